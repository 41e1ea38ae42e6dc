"""Per-stage timing on a generated card; same as ``cardseg bench``.

    python scripts/bench.py --size 3mp --repeat 5
"""
import sys

from cardseg.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench", *sys.argv[1:]]))
