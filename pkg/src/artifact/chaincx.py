"""Finitely generated free Z-chain complexes and their reduction.

A complex is a list of ranks plus one boundary matrix per positive degree,
with the column-vector convention: d_n has shape rank(n-1) x rank(n).
Reduction is by simple homotopy collapses: whenever some boundary entry
d_n[b][a] is a unit, the pair (a, b) spans an exact direct summand and can
be removed after a single row update, preserving all homology.  Iterating
this is how the large boundary matrices coming from resolutions are cut
down to a size where Smith normal form is cheap.

Serialization format (used by the CLI and fixtures):

    line 1: D, the number of chain degrees (groups C_0 .. C_{D-1})
    line 2: the D ranks
    then D-1 matrices, the boundaries d_1 .. d_{D-1}, each in the
    matrix text format ("rows cols" header plus row lines).
"""

import heapq
from dataclasses import dataclass

from .errors import CompositionNonzero, DegreeOutOfRange, FormatError, ShapeMismatch
from .exactlin import IntMatrix, homology_of_pair


@dataclass
class CollapseStep:
    """One simple homotopy collapse: the removed source generator (degree
    `degree`) and target generator (degree-1), in the labelling of the
    complex the reduction started from."""
    degree: int
    source: int
    target: int


class FreeChainComplexZ:
    """A chain complex of finitely generated free Z-modules.

    ranks[n] is the rank of C_n; diffs[n] (1 <= n <= top_degree) is the
    boundary C_n -> C_{n-1} acting on column vectors.  The constructor
    checks shapes only; use verify_complex for the d.d = 0 check, which
    costs a matrix product per degree.
    """

    def __init__(self, ranks, diffs, trace=None):
        ranks = list(ranks)
        if not ranks:
            raise ShapeMismatch("a complex needs at least one degree")
        if len(diffs) != len(ranks) - 1:
            raise ShapeMismatch("expected %d boundary maps, got %d"
                                % (len(ranks) - 1, len(diffs)))
        for n, d in enumerate(diffs, start=1):
            if d.rows != ranks[n - 1] or d.cols != ranks[n]:
                raise ShapeMismatch(
                    "boundary %d has shape %dx%d, expected %dx%d"
                    % (n, d.rows, d.cols, ranks[n - 1], ranks[n]))
        self.ranks = ranks
        self.diffs = list(diffs)
        self.trace = list(trace) if trace else []

    @property
    def top_degree(self):
        return len(self.ranks) - 1

    def rank(self, n):
        return self.ranks[n] if 0 <= n <= self.top_degree else 0

    def boundary(self, n):
        """d_n as a matrix, including the zero maps off both ends."""
        if 1 <= n <= self.top_degree:
            return self.diffs[n - 1]
        if n <= 0:
            return IntMatrix.zeros(0, self.rank(0)) if n == 0 \
                else IntMatrix.zeros(0, 0)
        # n > top_degree: source is zero
        return IntMatrix.zeros(self.rank(n - 1), 0)

    def __eq__(self, other):
        return (isinstance(other, FreeChainComplexZ)
                and self.ranks == other.ranks and self.diffs == other.diffs)

    def to_text(self):
        out = ["%d" % len(self.ranks), " ".join(str(r) for r in self.ranks)]
        for d in self.diffs:
            out.append(d.to_text().rstrip("\n"))
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise FormatError("empty chain complex text")
        try:
            ndeg = int(lines[0])
            ranks = [int(t) for t in lines[1].split()]
        except (ValueError, IndexError):
            raise FormatError("bad chain complex header") from None
        if len(ranks) != ndeg:
            raise FormatError("rank line lists %d degrees, header says %d"
                              % (len(ranks), ndeg))
        pos = 2
        diffs = []
        for _ in range(ndeg - 1):
            if pos >= len(lines):
                raise FormatError("missing boundary matrix")
            header = lines[pos].split()
            if len(header) != 2:
                raise FormatError("bad matrix header %r" % lines[pos])
            nrows = int(header[0])
            chunk = "\n".join(lines[pos:pos + 1 + nrows])
            diffs.append(IntMatrix.from_text(chunk))
            pos += 1 + nrows
        return cls(ranks, diffs)

    def __repr__(self):
        return "FreeChainComplexZ(ranks=%r)" % (self.ranks,)


def verify_complex(C):
    """Check d_n . d_{n+1} = 0 in every degree; raises CompositionNonzero."""
    for n in range(1, C.top_degree):
        if not (C.boundary(n) * C.boundary(n + 1)).is_zero():
            raise CompositionNonzero("d_%d . d_%d is nonzero" % (n, n + 1))
    return True


def homology(C, n):
    """H_n(C) as abelian invariants."""
    if not 0 <= n <= C.top_degree:
        raise DegreeOutOfRange("degree %d not in 0..%d" % (n, C.top_degree))
    return homology_of_pair(C.boundary(n), C.boundary(n + 1))


def all_homology(C):
    return [homology(C, n) for n in range(C.top_degree + 1)]


def contract(C):
    """Reduce by simple homotopy collapses; homology is preserved.

    Greedy strategy: degrees are processed bottom up and exhausted one at a
    time; within a degree the unit entry with least fill-in
    (nnz(row)-1)*(nnz(col)-1) is collapsed first, via a lazily revalidated
    heap.  A collapse at degree n can create new unit entries only at
    degree n itself (higher degrees just lose a column, lower ones a row),
    so one ascending pass is complete and the result has no unit entries
    at all.  The collapse trace is recorded on the result in the original
    generator labelling.
    """
    top = C.top_degree
    # sparse mutable copy: bnd[n][src][tgt] = coeff, cob[n][tgt] = sources
    bnd = {}
    cob = {}
    for n in range(1, top + 1):
        d = C.boundary(n)
        bn = {s: {} for s in range(d.cols)}
        cn = {t: set() for t in range(d.rows)}
        for t in range(d.rows):
            row = d.data[t]
            for s in range(d.cols):
                if row[s]:
                    bn[s][t] = row[s]
                    cn[t].add(s)
        bnd[n] = bn
        cob[n] = cn
    alive = [set(range(C.rank(n))) for n in range(top + 1)]
    trace = []

    def unit_candidates(n, srcs):
        for a in srcs:
            row = bnd[n].get(a)
            if not row:
                continue
            for b, v in row.items():
                if v == 1 or v == -1:
                    fill = (len(row) - 1) * (len(cob[n][b]) - 1)
                    yield (fill, a, b)

    for n in range(1, top + 1):
        heap = list(unit_candidates(n, list(bnd[n])))
        heapq.heapify(heap)
        while heap:
            fill, a, b = heapq.heappop(heap)
            if a not in alive[n] or b not in alive[n - 1]:
                continue
            eps = bnd[n][a].get(b, 0)
            if eps not in (1, -1):
                continue
            current = (len(bnd[n][a]) - 1) * (len(cob[n][b]) - 1)
            if current != fill:
                heapq.heappush(heap, (current, a, b))
                continue

            # clear column b: row_s -= (lambda * eps) * row_a for the other
            # sources s hitting b (eps is its own inverse)
            row_a = bnd[n][a]
            touched = []
            for s in [s for s in cob[n][b] if s != a]:
                lam = bnd[n][s][b]
                coef = lam * eps
                row_s = bnd[n][s]
                for t, v in row_a.items():
                    w = row_s.get(t, 0) - coef * v
                    if w:
                        row_s[t] = w
                        cob[n][t].add(s)
                    else:
                        row_s.pop(t, None)
                        cob[n][t].discard(s)
                assert b not in row_s
                touched.append(s)

            # delete a (degree n) and b (degree n-1)
            alive[n].discard(a)
            alive[n - 1].discard(b)
            for t in bnd[n].pop(a):
                cob[n][t].discard(a)
            cob[n].pop(b)
            if n + 1 <= top:
                # higher boundary just loses the target coordinate a
                for c in cob[n + 1].pop(a, ()):  # pragma: no branch
                    bnd[n + 1][c].pop(a, None)
            if n - 1 >= 1:
                # lower boundary loses the source row b
                for t in bnd[n - 1].pop(b, {}):
                    cob[n - 1][t].discard(b)

            trace.append(CollapseStep(n, a, b))
            for cand in unit_candidates(n, touched):
                heapq.heappush(heap, cand)

    # rebuild matrices over the survivors
    index = [
        {g: i for i, g in enumerate(sorted(alive[n]))}
        for n in range(top + 1)
    ]
    ranks = [len(alive[n]) for n in range(top + 1)]
    diffs = []
    for n in range(1, top + 1):
        m = IntMatrix.zeros(ranks[n - 1], ranks[n])
        for s in alive[n]:
            js = index[n][s]
            for t, v in bnd[n].get(s, {}).items():
                m.data[index[n - 1][t]][js] = v
        diffs.append(m)
    return FreeChainComplexZ(ranks, diffs, trace=trace)
