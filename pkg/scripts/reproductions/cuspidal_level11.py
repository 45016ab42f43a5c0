#!/usr/bin/env python3
"""Cuspidal cohomology of the level-11 subgroup with trivial coefficients.

The kernel of restriction to the boundary is Z^2, two copies of the one
cusp form of weight 2; recorded in cuspidal_level11.expected.
"""

import sys

from artifact.cli import main

if __name__ == "__main__":
    sys.exit(main(["cuspidal", "--gamma0", "11", "--degree", "1",
                   "--module-degree", "0"]))
