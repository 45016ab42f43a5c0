#!/usr/bin/env python3
"""Weight-2 Hecke eigenvalues on H^1 of the level-11 subgroup.

Each multiset is {1 + p} from the boundary part plus the newform
eigenvalue a_p twice; recorded in hecke_level11.expected.
"""

import sys

from artifact.cli import main

if __name__ == "__main__":
    sys.exit(main(["hecke", "--gamma0", "11", "--weight", "2",
                   "--ops", "2,3,5,7", "--emit", "eigenvalues"]))
