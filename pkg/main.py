#!/usr/bin/env python3

"""
conelab - Main Entry Point

Runs the conelab command-line interface from a source checkout, e.g.

    ./main.py decompose --n 3 --algebra R --mode certificate
"""

from conelab.cli import main

if __name__ == "__main__":
    main()
