#!/usr/bin/env python3
"""Discrete vector field on the two-room house complex.

The house is contractible but not collapsible, so the maximal vector
field leaves one critical cell in each dimension while the critical
complex still has the homology of a point; recorded in
two_room_house.expected.
"""

import sys

from artifact.cli import main

if __name__ == "__main__":
    sys.exit(main(["dvf"]))
