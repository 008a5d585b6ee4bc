"""
Error Types
Exceptions raised across the package, each carrying the process exit code
the command line reports for it
"""
from typing import Any, Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2
EXIT_EMPTY_RESULT = 3


class ChanBondError(Exception):
    """Base error with a human readable detail and an exit code"""

    exit_code: int = EXIT_DATA_ERROR

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class InvalidArgumentError(ChanBondError, ValueError):
    """An operation was called outside its preconditions"""


class TraceFormatError(ChanBondError):
    """A trace file is unreadable or ill-formed"""

    def __init__(self, detail: str, offset: Optional[int] = None):
        if offset is not None:
            detail = f"{detail} (at byte offset {offset})"
        super().__init__(detail)
        self.offset = offset


class DegenerateFitError(ChanBondError):
    """A Markov fit was attempted on a series that never changes state"""

    def __init__(self, value: int, channel: Optional[Any] = None):
        where = f" on channel {channel}" if channel is not None else ""
        super().__init__(f"Cannot fit a two-state model{where}: series is constantly {value}")
        self.value = value
        self.channel = channel


class ConfigInfeasibleError(ChanBondError):
    """The MAC/PHY configuration cannot fit a single packet in a TXOP"""


class EmptyResultError(ChanBondError):
    """Nothing survived filtering, so there is nothing to report"""

    exit_code = EXIT_EMPTY_RESULT
