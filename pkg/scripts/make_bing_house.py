"""Build the two-room house fixture from its unit-square description.

The house sits on a 3x5 footprint with two stories (z = 0..2).  Full
horizontal plates at z = 0, 1, 2 and the four outer walls enclose two
rooms.  Two 1x1 vertical shafts connect the rooms to the outside world in
the crossed-over way that makes the space famous: shaft A spans the upper
story over the footprint [1,2]x[1,2] and is open at the roof and at the
mid floor, so it leads from the roof into the lower room; shaft B spans
the lower story over [1,2]x[3,4] and is open at the ground and at the mid
floor, leading from below into the upper room.  One membrane panel per
shaft (joining a shaft corner to the nearest outer wall) keeps the space
simply connected.

The script rebuilds the complex from this description, checks the cell
counts (72 vertices, 154 edges, 83 squares), checks that every edge bounds
at least two squares (the structural fact that rules out a one-critical
vector field), checks the homology (Z, 0, 0), and writes the incidence
data in the complex file format next to the package data.

Usage: python3 scripts/make_bing_house.py [output-path]
"""

import sys
from pathlib import Path

from artifact.chaincx import all_homology
from artifact.cwdvf import cubical_complex, save_complex


def bing_house_squares():
    """The 83 unit squares of the house as (base, axes) cubical cells."""
    squares = []
    # horizontal plates, with the shaft openings left out:
    # roof over shaft A, ground under shaft B, mid floor under/over both
    holes = {0: {(1, 3)}, 1: {(1, 1), (1, 3)}, 2: {(1, 1)}}
    for z in (0, 1, 2):
        for x in range(3):
            for y in range(5):
                if (x, y) not in holes[z]:
                    squares.append(((x, y, z), (0, 1)))
    # outer walls, both stories
    for z in (0, 1):
        for x in range(3):
            squares.append(((x, 0, z), (0, 2)))
            squares.append(((x, 5, z), (0, 2)))
        for y in range(5):
            squares.append(((0, y, z), (1, 2)))
            squares.append(((3, y, z), (1, 2)))
    # shaft A: upper story tube over [1,2]x[1,2]
    squares += [((1, 1, 1), (1, 2)), ((2, 1, 1), (1, 2)),
                ((1, 1, 1), (0, 2)), ((1, 2, 1), (0, 2))]
    # shaft B: lower story tube over [1,2]x[3,4]
    squares += [((1, 3, 0), (1, 2)), ((2, 3, 0), (1, 2)),
                ((1, 3, 0), (0, 2)), ((1, 4, 0), (0, 2))]
    # membranes joining each shaft to the nearest outer wall
    squares += [((1, 0, 1), (1, 2)), ((1, 4, 0), (1, 2))]
    return squares


def main():
    out = (Path(sys.argv[1]) if len(sys.argv) > 1 else
           Path(__file__).resolve().parents[1]
           / "src" / "artifact" / "data" / "bing_house.cw")
    X = cubical_complex(bing_house_squares())
    assert X.counts == [72, 154, 83], X.counts
    cofaces = X.coface_table()
    assert all(len(up) >= 2 for up in cofaces[1]), "an edge bounds one square"
    hom = all_homology(X.as_chain_complex())
    assert [str(h) for h in hom] == ["Z", "0", "0"], [str(h) for h in hom]
    out.parent.mkdir(parents=True, exist_ok=True)
    save_complex(X, out)
    print("wrote %s: cells %s, homology %s"
          % (out, X.counts, ", ".join(str(h) for h in hom)))


if __name__ == "__main__":
    main()
