#!/usr/bin/env python3
"""Runtime scaling sweep over the support ladder (defaults: 0:30, 30 repeats).

The full default sweep is hours of naive time at the top of the ladder;
pass --n-range/--repeats to shrink it, e.g. --n-range 0:20 --repeats 5.
"""

import sys

from hopd.cli import cli_main

if __name__ == "__main__":
    args = ["scaling", "--family", "narrow", "--out", "results"] + sys.argv[1:]
    raise SystemExit(cli_main(args))
