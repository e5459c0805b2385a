# /bench.py

import sys

from src.mmebench.cli import main

if __name__ == '__main__':
    sys.exit(main())
