#!/usr/bin/env python3
"""
HodgeBound command-line entry point.

Usage:
    python hodgebound.py bound --source thm1.2 --n 2 --xi 0 --D 4.4429 --rH 3.1416 --k 1 --p 0
    python hodgebound.py verify --mesh torus:32 --suite main --out report.json
"""

import sys

from src.cli import main

if __name__ == '__main__':
    sys.exit(main())
