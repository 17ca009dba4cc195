"""Finite pseudo-metric spaces and the coarse notions that make sense on them.

Distances are stored either exactly (``int`` / ``Fraction``) or as binary
floats.  Every comparison goes through :func:`leq` / :func:`close`, which are
exact on exact data and use the global tolerance :data:`TOL` otherwise.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import DomainMismatch, NotAPartition, NotCoarselyConnected

TOL = 1e-9


def is_exact(x) -> bool:
    return not isinstance(x, float)


def leq(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a <= b + TOL
    return a <= b


def lt(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a < b - TOL
    return a < b


def close(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(a - b) <= TOL
    return a == b


def parse_number(x):
    """JSON number or ``"p/q"`` string -> int, Fraction or float."""
    if isinstance(x, bool):
        raise ValueError("booleans are not distances")
    if isinstance(x, (int, Fraction, float)):
        return x
    if isinstance(x, str):
        if "." in x or "e" in x.lower():
            return float(x)
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    raise ValueError(f"not a number: {x!r}")


def format_number(x):
    """Inverse of :func:`parse_number` for JSON output."""
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


class FiniteMetricSpace:
    """A finite set of opaque point ids with a symmetric pseudo-metric table."""

    def __init__(self, points: Sequence[Hashable], rows, label: str = ""):
        self.points = tuple(points)
        self.label = label
        self.index = {p: i for i, p in enumerate(self.points)}
        if len(self.index) != len(self.points):
            raise ValueError("duplicate point ids")
        n = len(self.points)
        self._d = [list(r) for r in rows]
        if len(self._d) != n or any(len(r) != n for r in self._d):
            raise ValueError("distance table must be square and match the points")
        for i in range(n):
            if not close(self._d[i][i], 0):
                raise ValueError(f"nonzero self-distance at {self.points[i]!r}")
            for j in range(i):
                a, b = self._d[i][j], self._d[j][i]
                if not close(a, b):
                    raise ValueError("distance table is not symmetric")
                if lt(a, 0):
                    raise ValueError("negative distance")
        self.exact = all(is_exact(x) for r in self._d for x in r)

    # construction -------------------------------------------------------
    @classmethod
    def from_line(cls, coords, points=None, label=""):
        coords = [parse_number(x) for x in coords]
        points = list(range(len(coords))) if points is None else points
        rows = [[abs(a - b) for b in coords] for a in coords]
        return cls(points, rows, label)

    @classmethod
    def from_function(cls, points, fn: Callable, label=""):
        points = list(points)
        n = len(points)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = fn(points[i], points[j])
        return cls(points, rows, label)

    @classmethod
    def from_graph(cls, points, edges, label=""):
        """Shortest-path metric of a weighted graph; must be connected."""
        points = list(points)
        idx = {p: i for i, p in enumerate(points)}
        adj = [[] for _ in points]
        for a, b, w in edges:
            w = parse_number(w)
            adj[idx[a]].append((idx[b], w))
            adj[idx[b]].append((idx[a], w))
        rows = []
        for s in range(len(points)):
            dist = _dijkstra(adj, s)
            if any(x is None for x in dist):
                raise NotCoarselyConnected("graph metric requires a connected graph")
            rows.append(dist)
        return cls(points, rows, label)

    # access ---------------------------------------------------------------
    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"FiniteMetricSpace({self.label!r}, n={len(self)})"

    def d(self, i: int, j: int):
        return self._d[i][j]

    def dist(self, x, y):
        return self._d[self.index[x]][self.index[y]]

    def row(self, i: int):
        return self._d[i]

    def pairs(self):
        n = len(self)
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j, self._d[i][j]

    def diameter(self, ids=None):
        idx = range(len(self)) if ids is None else [self.index[p] for p in ids]
        idx = list(idx)
        best = 0
        for a in range(len(idx)):
            r = self._d[idx[a]]
            for b in range(a + 1, len(idx)):
                if r[idx[b]] > best:
                    best = r[idx[b]]
        return best

    def subspace(self, ids, label=None):
        idx = [self.index[p] for p in ids]
        rows = [[self._d[i][j] for j in idx] for i in idx]
        return FiniteMetricSpace([self.points[i] for i in idx], rows, label or self.label)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._d])

    def check_triangle(self) -> bool:
        """Triangle inequality over all triples, within TOL for float data."""
        n = len(self)
        if n < 3:
            return True
        if self.exact:
            d = self._d
            for j in range(n):
                dj = d[j]
                for i in range(n):
                    dij = d[i][j]
                    di = d[i]
                    for k in range(n):
                        if di[k] > dij + dj[k]:
                            return False
            return True
        a = self.as_array()
        for j in range(n):
            if np.any(a > a[:, j][:, None] + a[j][None, :] + TOL):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        if self.points != other.points:
            return False
        return all(close(a, b) for r, s in zip(self._d, other._d) for a, b in zip(r, s))

    __hash__ = None

    # serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "label": self.label,
            "points": list(self.points),
            "metric": {"kind": "table",
                       "rows": [[format_number(x) for x in r] for r in self._d]},
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteMetricSpace":
        points = [tuple(p) if isinstance(p, list) else p for p in data["points"]]
        label = data.get("label", "")
        metric = data["metric"]
        kind = metric["kind"]
        if kind == "table":
            rows = [[parse_number(x) for x in r] for r in metric["rows"]]
            return cls(points, rows, label)
        if kind == "line":
            return cls.from_line(metric["coords"], points, label)
        if kind == "graph":
            edges = [(points[i], points[j], w) for i, j, w in metric["edges"]]
            return cls.from_graph(points, edges, label)
        raise ValueError(f"unknown metric kind {kind!r}")

    @classmethod
    def load(cls, path) -> "FiniteMetricSpace":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _dijkstra(adj, s):
    dist = [None] * len(adj)
    dist[s] = 0
    heap = [(0, s)]
    done = [False] * len(adj)
    while heap:
        dv, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for w, c in adj[v]:
            nd = dv + c
            if dist[w] is None or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _scale_adjacency(space, c, strict_zero=False):
    n = len(space)
    adj = [[] for _ in range(n)]
    for i, j, dij in space.pairs():
        if leq(dij, c) and not (strict_zero and close(dij, 0)):
            adj[i].append(j)
            adj[j].append(i)
    return adj


def c_components(space: FiniteMetricSpace, c) -> list[list]:
    """Blocks of the c-path equivalence relation, in first-point order."""
    if c <= 0:
        raise ValueError("c must be positive")
    n = len(space)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, dij in space.pairs():
        if leq(dij, c):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    blocks: dict[int, list] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(space.points[i])
    return list(blocks.values())


def is_c_geodesic(space: FiniteMetricSpace, c) -> bool:
    if c <= 0:
        raise ValueError("c must be positive")
    n = len(space)
    adj = [[] for _ in range(n)]
    for i, j, dij in space.pairs():
        if leq(dij, c):
            adj[i].append((j, dij))
            adj[j].append((i, dij))
    for s in range(n):
        dist = _dijkstra(adj, s)
        row = space.row(s)
        for t in range(n):
            if dist[t] is None or not close(dist[t], row[t]):
                return False
    return True


def ultrametrize(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """Minimax chain distance d^u, via the maximum edge on minimum-spanning-tree paths."""
    n = len(space)
    rows = [[0] * n for _ in range(n)]
    if n == 0:
        return FiniteMetricSpace([], [], space.label)
    # Prim on the complete graph
    in_tree = [False] * n
    best = [None] * n
    link = [-1] * n
    best[0] = 0
    tree = [[] for _ in range(n)]
    for _ in range(n):
        v = -1
        for u in range(n):
            if not in_tree[u] and best[u] is not None and (v < 0 or best[u] < best[v]):
                v = u
        in_tree[v] = True
        if link[v] >= 0:
            w = space.d(v, link[v])
            tree[v].append((link[v], w))
            tree[link[v]].append((v, w))
        rv = space.row(v)
        for u in range(n):
            if not in_tree[u] and (best[u] is None or rv[u] < best[u]):
                best[u] = rv[u]
                link[u] = v
    for s in range(n):
        stack = [(s, -1, 0)]
        while stack:
            v, parent, m = stack.pop()
            rows[s][v] = m
            for w, c in tree[v]:
                if w != parent:
                    stack.append((w, v, c if c > m else m))
    return FiniteMetricSpace(space.points, rows, space.label)


def chain_diameter_profile(space: FiniteMetricSpace, r) -> object:
    """Largest diameter of an r-chain component."""
    return max((space.diameter(b) for b in c_components(space, r)), default=0)


@dataclass(frozen=True)
class ScaleGraph:
    quotient: dict      # point id -> representative id (first point of its zero-distance class)
    space: FiniteMetricSpace
    c: object


def scale_graph(space: FiniteMetricSpace, c) -> ScaleGraph:
    """Collapse zero-distance points, join classes at distance in (0, c], metric c * hops."""
    if c <= 0:
        raise ValueError("c must be positive")
    n = len(space)
    rep = list(range(n))
    for i in range(n):
        if rep[i] != i:
            continue
        for j in range(i + 1, n):
            if rep[j] == j and close(space.d(i, j), 0):
                rep[j] = i
    reps = [i for i in range(n) if rep[i] == i]
    pos = {r: k for k, r in enumerate(reps)}
    adj = [set() for _ in reps]
    for i, j, dij in space.pairs():
        a, b = pos[rep[i]], pos[rep[j]]
        if a != b and leq(dij, c):
            adj[a].add(b)
            adj[b].add(a)
    m = len(reps)
    rows = []
    for s in range(m):
        hops = [None] * m
        hops[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if hops[w] is None:
                        hops[w] = hops[v] + 1
                        nxt.append(w)
            frontier = nxt
        if any(h is None for h in hops):
            raise NotCoarselyConnected(f"space is not {c}-coarsely connected")
        rows.append([c * h for h in hops])
    quotient = {space.points[i]: space.points[rep[i]] for i in range(n)}
    graph = FiniteMetricSpace([space.points[r] for r in reps], rows, f"{space.label}_c")
    return ScaleGraph(quotient, graph, c)


@dataclass(frozen=True)
class ControlFunction:
    """Nondecreasing step envelope.

    ``kind == "upper"`` is constant from the left (value of the largest
    breakpoint <= t); ``kind == "lower"`` is constant from the right (value of
    the smallest breakpoint >= t).  ``tail`` applies past the last breakpoint:
    a slope for upper envelopes, ``math.inf`` for lower ones.
    """

    breakpoints: tuple
    tail: object
    kind: str = "upper"

    def __post_init__(self):
        vals = [v for _, v in self.breakpoints]
        if any(not leq(a, b) for a, b in zip(vals, vals[1:])):
            raise ValueError("control values must be nondecreasing")
        if self.kind == "lower" and not (self.tail == math.inf or self.tail > 0):
            raise ValueError("a lower control must diverge")

    def __call__(self, t):
        bps = self.breakpoints
        if not bps:
            return 0 if self.kind == "upper" else math.inf
        if self.kind == "upper":
            k = 0
            while k + 1 < len(bps) and leq(bps[k + 1][0], t):
                k += 1
            tb, v = bps[k]
            if k == len(bps) - 1 and lt(tb, t):
                return math.inf if self.tail == math.inf else v + self.tail * (t - tb)
            return v
        for tb, v in bps:
            if leq(t, tb):
                return v
        return math.inf if self.tail == math.inf else bps[-1][1] + self.tail * (t - bps[-1][0])

    def to_json(self):
        return {"kind": self.kind,
                "breakpoints": [[format_number(t), format_number(v)] for t, v in self.breakpoints],
                "tail": format_number(self.tail)}


@dataclass(frozen=True)
class MapSample:
    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    image: dict

    def __post_init__(self):
        missing = [p for p in self.domain.points if p not in self.image]
        if missing:
            raise ValueError(f"image undefined on {missing[:3]!r}")
        bad = [self.image[p] for p in self.domain.points if self.image[p] not in self.codomain.index]
        if bad:
            raise ValueError(f"image points not in codomain: {bad[:3]!r}")

    def __call__(self, x):
        return self.image[x]


def empirical_controls(f: MapSample):
    """Tightest step envelopes (lower, upper) for the observed pairs of ``f``."""
    dom, cod = f.domain, f.codomain
    pts = dom.points
    obs = []
    for i, p in enumerate(pts):
        for j in range(i, len(pts)):
            q = pts[j]
            obs.append((dom.d(i, j), cod.dist(f.image[p], f.image[q])))
    ts = sorted({t for t, _ in obs})
    obs.sort(key=lambda o: o[0])
    upper = []
    running = 0
    k = 0
    for t in ts:
        while k < len(obs) and obs[k][0] <= t:
            if obs[k][1] > running:
                running = obs[k][1]
            k += 1
        upper.append((t, running))
    lower = []
    running = math.inf
    k = len(obs) - 1
    for t in reversed(ts):
        while k >= 0 and obs[k][0] >= t:
            if obs[k][1] < running:
                running = obs[k][1]
            k -= 1
        lower.append((t, running))
    lower.reverse()
    return (ControlFunction(tuple(lower), math.inf, "lower"),
            ControlFunction(tuple(upper), 0, "upper"))


def map_closeness(f: MapSample, g: MapSample):
    if f.domain is not g.domain and f.domain != g.domain:
        raise DomainMismatch("maps have different domains")
    if f.codomain is not g.codomain and f.codomain != g.codomain:
        raise DomainMismatch("maps have different codomains")
    cod = f.codomain
    return max((cod.dist(f.image[x], g.image[x]) for x in f.domain.points), default=0)


@dataclass(frozen=True)
class AsdimWitness:
    r: object
    families: tuple = field(default_factory=tuple)


def verify_asdim_witness(space: FiniteMetricSpace, witness: AsdimWitness):
    """Return ``(ok, max_piece_diameter)``.

    ``ok`` holds when, inside every family, distinct pieces are at least
    ``witness.r`` apart.
    """
    covered = set()
    for fam in witness.families:
        seen = set()
        for piece in fam:
            for p in piece:
                if p not in space.index:
                    raise NotAPartition(f"unknown point {p!r}")
                if p in seen:
                    raise NotAPartition(f"point {p!r} lies in two pieces of one family")
                seen.add(p)
        covered |= seen
    if covered != set(space.points):
        raise NotAPartition("witness families do not cover the space")
    max_diam = 0
    ok = True
    for fam in witness.families:
        pieces = [[space.index[p] for p in piece] for piece in fam]
        for piece in pieces:
            dm = space.diameter([space.points[i] for i in piece])
            if dm > max_diam:
                max_diam = dm
        for a in range(len(pieces)):
            for b in range(a + 1, len(pieces)):
                gap = min(space.d(i, j) for i in pieces[a] for j in pieces[b])
                if lt(gap, witness.r):
                    ok = False
    return ok, max_diam

