"""Trace-driven simulation and analysis of 802.11 channel bonding."""

__version__ = "1.0.0"
