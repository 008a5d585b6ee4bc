import sys
from typing import List, Optional

import click
from dotenv import load_dotenv
from rich.markup import escape

from chanbond import __version__
from chanbond.binarize_commands import binarize_command
from chanbond.errors import EXIT_OK, EXIT_USAGE, ChanBondError
from chanbond.simulate_commands import simulate_command
from chanbond.synth_commands import synth_group
from chanbond.utils.console import console

load_dotenv()


@click.group()
@click.version_option(__version__, prog_name="chanbond")
def cli() -> None:
    """Trace-driven 802.11 channel bonding simulator"""


# Include commands
cli.add_command(binarize_command)
cli.add_command(simulate_command)
cli.add_command(synth_group)


def run(argv: Optional[List[str]] = None) -> int:
    """Run the command line and map failures to exit codes"""
    try:
        result = cli.main(args=argv, prog_name="chanbond", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        console.print("Aborted")
        return EXIT_USAGE
    except ChanBondError as e:
        console.print(f"[red]Error:[/red] {escape(e.detail)}", highlight=False)
        return e.exit_code
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
