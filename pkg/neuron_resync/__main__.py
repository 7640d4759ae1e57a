"""
Main Entry Point - Direct Package Execution 🚀

Enables running the package directly using `python -m neuron_resync`.
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
