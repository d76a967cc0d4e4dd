#!/usr/bin/env python3
"""Command-line interface for the BRST workbench."""

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent / "src"))

from brstbench.cli import main

if __name__ == "__main__":
    sys.exit(main())
