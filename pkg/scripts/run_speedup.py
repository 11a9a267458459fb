#!/usr/bin/env python3
"""Full model-pair speedup matrix with the experiment defaults (m=30)."""

import sys

from hopd.cli import cli_main

if __name__ == "__main__":
    args = ["speedup", "--out", "results"] + sys.argv[1:]
    raise SystemExit(cli_main(args))
