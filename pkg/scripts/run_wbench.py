#!/usr/bin/env python3
"""Naive vs certified transport benchmark on random depth-2 instances."""

import sys

from hopd.cli import cli_main

if __name__ == "__main__":
    args = ["wbench", "--out", "results"] + sys.argv[1:]
    raise SystemExit(cli_main(args))
