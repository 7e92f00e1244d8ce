"""
GPFP Toolkit - command line entry point.

Usage:
    python app.py <subcommand> [options]
    python app.py --help
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
