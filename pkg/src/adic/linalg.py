"""Exact sparse Gaussian elimination over Q or F_p.

Vectors are dicts ``{index: coeff}`` with no zero entries.  ``Echelon`` keeps
a fully reduced row-echelon basis of the span of the vectors added to it,
optionally remembering how each basis row combines the inputs, so that it can
answer membership, produce solutions and report kernel vectors.
"""

from __future__ import annotations

from collections.abc import Hashable

SparseVec = dict


def axpy(y: SparseVec, a, x: SparseVec) -> None:
    """y += a*x in place."""
    for i, c in x.items():
        v = y.get(i)
        if v is None:
            y[i] = a * c
        else:
            v = v + a * c
            if v == 0:
                del y[i]
            else:
                y[i] = v


class Echelon:
    def __init__(self, track: bool = False):
        self.track = track
        self.rows: dict[int, SparseVec] = {}  # pivot -> row (pivot coeff 1)
        self.combos: dict[int, SparseVec] = {}  # pivot -> combination of input tags

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: SparseVec) -> tuple[SparseVec, SparseVec]:
        """Return (residue, combo) with vec = residue + sum(combo[tag] * input[tag])."""
        v = dict(vec)
        combo: SparseVec = {}
        for p in [i for i in vec if i in self.rows]:
            c = v.get(p)
            if c is None:
                continue
            axpy(v, -c, self.rows[p])
            if self.track:
                axpy(combo, c, self.combos[p])
        return v, combo

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)[0]

    def add(self, vec: SparseVec, tag: Hashable = None) -> SparseVec | None:
        """Insert a vector.  If it is dependent, return the kernel relation
        ``{tag: 1, ...}`` among inputs (when tracking), else None."""
        v, combo = self.reduce(vec)
        if not v:
            if self.track:
                rel = {tag: 1}
                axpy(rel, -1, combo)
                return rel
            return {}
        if self.track:
            own: SparseVec = {tag: 1}
            axpy(own, -1, combo)
        p = min(v)
        inv = 1 / v[p] if not isinstance(v[p], int) else _inverse(v[p])
        v = {i: c * inv for i, c in v.items()}
        if self.track:
            own = {i: c * inv for i, c in own.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c is not None:
                axpy(row, -c, v)
                if self.track:
                    axpy(self.combos[q], -c, own)
        self.rows[p] = v
        if self.track:
            self.combos[p] = own
        return None

    def solve(self, target: SparseVec) -> SparseVec | None:
        """Combination of inputs equal to target, or None if target is not in the span."""
        if not self.track:
            raise ValueError("solve needs a tracking Echelon")
        residue, combo = self.reduce(target)
        return None if residue else combo


def _inverse(c):
    from fractions import Fraction

    return Fraction(1, c)


def rank_of(vectors) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank
