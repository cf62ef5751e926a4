#!/usr/bin/env python3
"""
Command-line entry point for the CP^n star product toolkit.
"""

import sys
from pathlib import Path

# Add the cpn_star_reduction directory to the Python path
sys.path.append(str(Path(__file__).parent / "cpn_star_reduction"))

from cli import main

if __name__ == "__main__":
    sys.exit(main())
