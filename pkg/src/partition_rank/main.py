#!/usr/bin/env python3
"""
Partition Rank CLI

Console entry point; the subcommands live in partition_rank.cli.
"""

import sys

from .cli import main as run


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
