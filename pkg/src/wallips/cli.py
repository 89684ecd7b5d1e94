"""Console entry point."""

from __future__ import annotations

import sys

from .harness import run_cli


def main(argv=None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
