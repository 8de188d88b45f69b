"""Observables that refinement must not change.

``homology`` is the integral homology of the nerve of the category a loopless
flow generates (states as objects, path classes plus formal identities as
arrows).  It stands in for the underlying homotopy type.

``branch_report`` counts, at every state, the outgoing paths up to extension
(x ~ x*y) and the incoming paths up to extension on the left.  This is a
degree-0 proxy for the branching and merging configuration only; the
branching and merging homology groups in positive degrees are not computed.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import gcd

from scipy.cluster.hierarchy import DisjointSet

from .errors import NotLooplessError
from .flow import TableFlow, is_loopless

__all__ = [
    "ChainComplex",
    "HomologyResult",
    "BranchReport",
    "nerve_complex",
    "smith_normal_form",
    "homology",
    "branch_report",
]


@dataclass(frozen=True)
class ChainComplex:
    """``boundaries[k - 1]`` is the matrix of d_k : C_k -> C_{k-1}, rows indexed by C_{k-1}."""

    dims: tuple
    boundaries: tuple
    simplices: tuple = ()

    def check(self):
        for k in range(1, len(self.boundaries)):
            lower, upper = self.boundaries[k - 1], self.boundaries[k]
            for i, row in enumerate(lower):
                for j in range(self.dims[k + 1]):
                    if sum(row[m] * upper[m][j] for m in range(self.dims[k])):
                        raise ValueError(f"d_{k} d_{k + 1} is nonzero at ({i}, {j})")


def nerve_complex(x: TableFlow) -> ChainComplex:
    """Normalized chain complex of the nerve.

    Degree k > 0 is spanned by composable sequences of k path classes; degree
    0 by the states.  Face i drops the first class (i = 0), composes classes
    i and i+1, or drops the last class (i = k).
    """
    if not is_loopless(x):
        raise NotLooplessError("nerve homology needs a loopless flow")
    levels = [[(s,) for s in x.states]]
    current = [(c,) for c in x.classes]
    while current:
        levels.append(current)
        current = [seq + (c,) for seq in current for c in x.out_classes[x.tgt(seq[-1])]]

    index = [{s: i for i, s in enumerate(level)} for level in levels]
    boundaries = []
    for k in range(1, len(levels)):
        mat = [[0] * len(levels[k]) for _ in levels[k - 1]]
        for j, seq in enumerate(levels[k]):
            if k == 1:
                (c,) = seq
                mat[index[0][(x.tgt(c),)]][j] += 1
                mat[index[0][(x.src(c),)]][j] -= 1
                continue
            for i in range(k + 1):
                if i == 0:
                    face = seq[1:]
                elif i == k:
                    face = seq[:-1]
                else:
                    face = seq[:i - 1] + (x.compose[(seq[i - 1], seq[i])],) + seq[i + 1:]
                mat[index[k - 1][face]][j] += (-1) ** i
        boundaries.append(mat)
    return ChainComplex(tuple(len(level) for level in levels), tuple(boundaries), tuple(map(tuple, levels)))


def smith_normal_form(matrix) -> list:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix.

    Works on a sparse copy, always pivoting on an entry of least absolute
    value; the input is left untouched.
    """
    rows = defaultdict(dict)
    cols = defaultdict(set)
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            v = int(v)
            if v:
                rows[i][j] = v
                cols[j].add(i)

    def setv(i, j, v):
        if v:
            rows[i][j] = v
            cols[j].add(i)
        else:
            rows[i].pop(j, None)
            cols[j].discard(i)

    def row_sub(k, i, q):
        # row k -= q * row i
        for j, v in list(rows[i].items()):
            setv(k, j, rows[k].get(j, 0) - q * v)

    def col_sub(l, j, q):
        # column l -= q * column j
        for i in list(cols[j]):
            setv(i, l, rows[i].get(l, 0) - q * rows[i][j])

    diag = []
    while any(rows.values()):
        i, j = min(
            ((i, j) for i, r in rows.items() for j in r),
            key=lambda ij: (abs(rows[ij[0]][ij[1]]), ij),
        )
        while True:
            p = rows[i][j]
            for k in sorted(cols[j] - {i}):
                row_sub(k, i, rows[k][j] // p)
            for l in sorted(set(rows[i]) - {j}):
                col_sub(l, j, rows[i][l] // p)
            rest = [(k, j) for k in cols[j] if k != i] + [(i, l) for l in rows[i] if l != j]
            if not rest:
                break
            # a nonzero remainder is smaller than the pivot; move the pivot there
            i, j = min(rest, key=lambda ij: (abs(rows[ij[0]][ij[1]]), ij))
        diag.append(abs(p))
        del rows[i]
        cols[j].clear()
    diag.sort()
    for a in range(len(diag)):
        for b in range(a + 1, len(diag)):
            g = gcd(diag[a], diag[b])
            diag[a], diag[b] = g, diag[a] * diag[b] // g
    return diag


@dataclass(frozen=True, eq=False)
class HomologyResult:
    """Betti numbers and torsion coefficients per degree.

    Equality ignores trailing degrees that carry no homology, so flows
    whose nerves have different dimensions can still compare equal.
    """

    betti: tuple
    torsion: tuple

    def trimmed(self) -> tuple:
        degrees = list(zip(self.betti, self.torsion))
        while degrees and degrees[-1] == (0, ()):
            degrees.pop()
        return tuple(degrees)

    def __eq__(self, other):
        if not isinstance(other, HomologyResult):
            return NotImplemented
        return self.trimmed() == other.trimmed()

    def __hash__(self):
        return hash(self.trimmed())

    def group(self, k) -> str:
        if k >= len(self.betti):
            return "0"
        parts = []
        b = self.betti[k]
        if b:
            parts.append("ℤ" if b == 1 else f"ℤ^{b}")
        parts += [f"ℤ/{t}" for t in self.torsion[k]]
        return " ⊕ ".join(parts) or "0"

    def report(self) -> str:
        lines = [f"H_{k} = {self.group(k)}" for k in range(len(self.betti))]
        return "\n".join(lines)


def homology(x: TableFlow) -> HomologyResult:
    cx = nerve_complex(x)
    ranks, factors = [0], [[]]
    for mat in cx.boundaries:
        d = smith_normal_form(mat)
        ranks.append(len(d))
        factors.append(d)
    ranks.append(0)
    factors.append([])
    betti, torsion = [], []
    for k, n in enumerate(cx.dims):
        betti.append(n - ranks[k] - ranks[k + 1])
        torsion.append(tuple(t for t in factors[k + 1] if t > 1))
    return HomologyResult(tuple(betti), tuple(torsion))


@dataclass(frozen=True)
class BranchReport:
    """Per-state counts of branching and merging germ classes (degree-0 proxy)."""

    states: tuple
    branch: dict
    merge: dict

    def report(self) -> str:
        return "\n".join(f"{s}: branch {self.branch[s]} / merge {self.merge[s]}" for s in self.states)


def _germs(x: TableFlow, s, outgoing: bool) -> int:
    classes = x.out_classes[s] if outgoing else x.in_classes[s]
    if not classes:
        return 0
    uf = DisjointSet(classes)
    for c in classes:
        if outgoing:
            for d in x.out_classes[x.tgt(c)]:
                uf.merge(c, x.compose[(c, d)])
        else:
            for d in x.in_classes[x.src(c)]:
                uf.merge(c, x.compose[(d, c)])
    return uf.n_subsets


def branch_report(x: TableFlow) -> BranchReport:
    if not is_loopless(x):
        raise NotLooplessError("branch report needs a loopless flow")
    return BranchReport(
        x.states,
        {s: _germs(x, s, True) for s in x.states},
        {s: _germs(x, s, False) for s in x.states},
    )
