"""
qpack - Main Application Entry Point
"""

import os
import sys

# Add current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from ui.cli import main


if __name__ == "__main__":
    sys.exit(main())
