#!/usr/bin/env python3
"""Main entry point for the partition-rank package."""

from partition_rank.main import main

if __name__ == "__main__":
    main()
