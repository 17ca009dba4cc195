"""Sparse integer row lattices in echelon form.

Vectors are dicts ``{column: nonzero int}``.  Rows are kept in an upper
echelon form with positive pivots, built incrementally with extended-gcd row
operations, so membership and coset normal forms are exact over Z.
"""
from __future__ import annotations

import heapq


def _axpy(y: dict, a: int, x: dict) -> dict:
    """Return y + a*x as a new sparse vector."""
    out = dict(y)
    for c, v in x.items():
        s = out.get(c, 0) + a * v
        if s:
            out[c] = s
        else:
            out.pop(c, None)
    return out


def _combine(a: int, x: dict, b: int, y: dict) -> dict:
    out = {}
    for c in x.keys() | y.keys():
        s = a * x.get(c, 0) + b * y.get(c, 0)
        if s:
            out[c] = s
    return out


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class IntegerLattice:
    def __init__(self, rows=()):
        self.pivots: dict[int, dict] = {}
        for r in rows:
            self.add(r)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def copy(self) -> "IntegerLattice":
        lat = IntegerLattice()
        lat.pivots = {c: dict(r) for c, r in self.pivots.items()}
        return lat

    def add(self, vec: dict) -> bool:
        """Insert a generator; return True if the lattice grew."""
        vec = {c: v for c, v in vec.items() if v}
        while vec:
            c = min(vec)
            row = self.pivots.get(c)
            if row is None:
                if vec[c] < 0:
                    vec = {k: -v for k, v in vec.items()}
                self.pivots[c] = vec
                return True
            p, a = row[c], vec[c]
            if a % p == 0:
                vec = _axpy(vec, -(a // p), row)
                continue
            g, x, y = _xgcd(p, a)
            new_row = _combine(x, row, y, vec)
            rest = _combine(a // g, row, -(p // g), vec)
            if new_row[c] < 0:
                new_row = {k: -v for k, v in new_row.items()}
            self.pivots[c] = new_row
            vec = rest
        return False

    def reduce(self, vec: dict) -> dict:
        """Canonical representative of ``vec`` modulo the lattice."""
        vec = {c: v for c, v in vec.items() if v}
        heap = list(vec)
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen or c not in vec:
                continue
            seen.add(c)
            row = self.pivots.get(c)
            if row is None:
                continue
            q = vec[c] // row[c]
            if q:
                vec = _axpy(vec, -q, row)
                for k in row:
                    if k not in seen:
                        heapq.heappush(heap, k)
        return vec

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def dense_rows(self, columns: int):
        return [[r.get(c, 0) for c in range(columns)] for _, r in sorted(self.pivots.items())]
