"""Standalone entry point for the kernel benchmark (numba vs numpy)."""

import sys

from esn_readouts.benchmark import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
