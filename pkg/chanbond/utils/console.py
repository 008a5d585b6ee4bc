"""Console logging shared by the command line entry points."""
import logging

from rich.console import Console
from rich.logging import RichHandler

# everything printed is diagnostics; results go to files
console = Console(stderr=True, soft_wrap=True)


def setup_logging(level: str = "INFO", quiet: bool = False) -> None:
    logging.basicConfig(
        level="WARNING" if quiet else level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=False, show_path=False)],
        force=True,
    )
