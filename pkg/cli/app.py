"""
Ansense CLI Application

Main CLI application entry point. Exit codes: 0 success, 1 usage error,
2 episode, benchmark or training failure, 3 I/O error.
"""

import sys
from typing import List, Optional

import click

from ansense.exceptions import AnsenseError
from ansense.storage import StorageError
from .main import ansense

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_IO = 3


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map failures onto exit codes"""
    try:
        code = ansense.main(args=argv, prog_name="ansense", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except ValueError as e:
        click.echo(f"ERROR: Invalid configuration: {e}", err=True)
        return EXIT_USAGE
    except AnsenseError as e:
        click.echo(f"ERROR: {type(e).__name__}: {e}", err=True)
        return EXIT_FAILURE
    except StorageError as e:
        where = f" ({e.path})" if e.path else ""
        click.echo(f"ERROR: I/O failure{where}: {e}", err=True)
        return EXIT_IO
    except OSError as e:
        click.echo(f"ERROR: I/O failure: {e}", err=True)
        return EXIT_IO
    return code if isinstance(code, int) else EXIT_OK


# Export the main CLI function
__all__ = ['ansense', 'main']


if __name__ == '__main__':
    sys.exit(main())
