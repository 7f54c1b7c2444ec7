"""Entry point for the QCP project.

This runs the command-line interface when run as a module:
    python -m QCP.main orthogonal --n 16 --trials 17 --change-point sweep

It falls back to non-package imports when necessary so running as a script
may still work depending on your PYTHONPATH / current working directory.
"""

import sys


def import_cli_main():
    try:
        from QCP.ui.cli import main as cli_main
        return cli_main
    except ImportError:
        # Put the project root (parent of this package) on sys.path so the
        # absolute import works when this file is executed as a script.
        from pathlib import Path
        project_root = Path(__file__).resolve().parent.parent
        if str(project_root) not in sys.path:
            sys.path.insert(0, str(project_root))
        try:
            from QCP.ui.cli import main as cli_main
            return cli_main
        except ImportError as e:
            raise ImportError("Failed to import the QCP command-line interface") from e


def main(argv=None):
    cli_main = import_cli_main()
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
