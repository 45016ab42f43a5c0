#!/usr/bin/env python3
"""Indices of four congruence subgroups in the full modular group.

Expected: 56, 144, 90, 1800 for Gamma0(39), Gamma(6), Gamma0(50), and
Gamma0(1000); recorded in indices.expected.
"""

import sys

from artifact.cli import main

CALLS = [
    ["index", "--gamma0", "39"],
    ["index", "--gamma", "6"],
    ["index", "--gamma0", "50"],
    ["index", "--gamma0", "1000"],
]

if __name__ == "__main__":
    rc = 0
    for args in CALLS:
        rc = max(rc, main(args))
    sys.exit(rc)
