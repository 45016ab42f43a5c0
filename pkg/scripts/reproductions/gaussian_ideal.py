#!/usr/bin/env python3
"""The Gaussian ideal (41 + 56i): norm, primality, index, and ratios.

The torsion orders are the frozen abelianization invariants of the
level (41+56i) congruence subgroup; recorded in gaussian_ideal.expected.
"""

import sys

from artifact.cli import main

ORDERS = "2,2,4,5,7,16,29,43,157,179,1877,7741,22037,292306033,4078793513671"

if __name__ == "__main__":
    sys.exit(main(["quad", "--d", "-1", "--ideal", "41+56i",
                   "--report", "norm,prime,index,l-ratio,torsion-ratio",
                   "--orders", ORDERS]))
