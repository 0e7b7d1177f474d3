#!/usr/bin/env python3
"""Console entry point: python bohmq.py <command> [--config FILE] [flags]."""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
