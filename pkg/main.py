#!/usr/bin/env python3
"""
Partition Rank

Run the command-line interface from a source checkout without installing.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from partition_rank.main import main

if __name__ == "__main__":
    main()
