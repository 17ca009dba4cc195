"""Evaluable groups with marked generating sets, and word-metric computations.

Every oracle works on canonical hashable elements (tuples, ints, Fractions), so
equality of elements is plain ``==``.  ``oracle.key(g)`` is the canonical text
form used for deterministic ordering and on-disk caches.
"""
from __future__ import annotations

import heapq
import json
import os
from fractions import Fraction

from .errors import (BadParams, BudgetExceeded, GenerationFailure, NotConnected,
                     NotFoundWithinRadius)
from .metric import FiniteMetricSpace, leq

DEFAULT_BUDGET = 1_000_000


def default_budget() -> int:
    return int(os.environ.get("COARSEKIT_BUDGET", DEFAULT_BUDGET))


def _compact(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


class GroupOracle:
    """A group given by its operations plus a symmetric list of labelled generators."""

    def __init__(self, family, params, identity, multiply, inverse, encode,
                 generators, decode=None):
        self.family = family
        self.params = tuple(params)
        self.identity = identity
        self.multiply = multiply
        self.inverse = inverse
        self.encode = encode
        self.decode = decode
        self.generators = [(str(lab), g) for lab, g in generators]
        if not self.generators:
            raise BadParams("generating list must be nonempty")
        labels = [lab for lab, _ in self.generators]
        if len(set(labels)) != len(labels):
            raise BadParams("generator labels must be distinct")
        elements = {g for _, g in self.generators}
        for lab, g in self.generators:
            if self.inverse(g) not in elements:
                raise BadParams(f"generating list not symmetric: no inverse for {lab}")
        self._gen = dict(self.generators)
        self._ball = None

    def __repr__(self):
        return f"GroupOracle({self.spec()!r}, gens={[lab for lab, _ in self.generators]})"

    def spec(self) -> str:
        return self.family + "".join(f":{p}" for p in self.params)

    def key(self, g) -> str:
        return _compact(self.encode(g))

    def generator(self, label):
        return self._gen[label]

    def inverse_label(self, label):
        inv = self.inverse(self._gen[label])
        for lab, g in self.generators:
            if g == inv:
                return lab
        raise KeyError(label)

    def word(self, labels) -> object:
        g = self.identity
        for lab in labels:
            g = self.multiply(g, self._gen[lab])
        return g

    def parse_word(self, text: str) -> list:
        """Split ``text`` into generator labels (longest match; spaces ignored)."""
        text = text.replace(" ", "").replace(",", "")
        labels = sorted(self._gen, key=len, reverse=True)
        out = []
        while text:
            for lab in labels:
                if text.startswith(lab):
                    out.append(lab)
                    text = text[len(lab):]
                    break
            else:
                raise BadParams(f"cannot parse word at {text!r}")
        return out

    def power(self, g, n: int):
        base = g if n >= 0 else self.inverse(g)
        n = abs(n)
        result = self.identity
        while n:
            if n & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            n >>= 1
        return result

    def with_generators(self, generators) -> "GroupOracle":
        return GroupOracle(self.family, self.params, self.identity, self.multiply,
                           self.inverse, self.encode, generators, self.decode)

    def cached_ball(self) -> "BallTable":
        if self._ball is None:
            self._ball = BallTable(self)
        return self._ball


# --- families -----------------------------------------------------------------

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def free_group(k: int) -> GroupOracle:
    if k < 1:
        raise BadParams("free group needs k >= 1")

    def mul(g, h):
        i = 0
        n = min(len(g), len(h))
        while i < n and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[:len(g) - i] + h[i:]

    def inv(g):
        return tuple(-x for x in reversed(g))

    gens = []
    for i in range(1, k + 1):
        gens.append((_LETTERS[i - 1], (i,)))
        gens.append((_LETTERS[i - 1].upper(), (-i,)))
    return GroupOracle("free", (k,), (), mul, inv, list, gens, decode=tuple)


def free_abelian(n: int, generators=None) -> GroupOracle:
    if n < 1:
        raise BadParams("free abelian group needs n >= 1")

    def mul(g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(g):
        return tuple(-a for a in g)

    if generators is None:
        generators = []
        for i in range(n):
            e = tuple(1 if j == i else 0 for j in range(n))
            generators.append((_LETTERS[i], e))
            generators.append((_LETTERS[i].upper(), inv(e)))
    return GroupOracle("abelian", (n,), (0,) * n, mul, inv, list, generators, decode=tuple)


def heisenberg() -> GroupOracle:
    """Integer upper unitriangular 3x3 matrices as triples (a, b, c)."""

    def mul(g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inv(g):
        return (-g[0], -g[1], -g[2] + g[0] * g[1])

    gens = [("s", (1, 0, 0)), ("S", (-1, 0, 0)),
            ("t", (0, 1, 0)), ("T", (0, -1, 0)),
            ("u", (0, 0, 1)), ("U", (0, 0, -1))]
    return GroupOracle("heisenberg", (), (0, 0, 0), mul, inv, list, gens, decode=tuple)


def bs1m(m: int) -> GroupOracle:
    """BS(1, m) as pairs (a, x), x in Z[1/m], with (a, x)(b, y) = (a + b, x + m^a y).

    In this model t = (1, 0) and s = (0, 1) satisfy t s t^-1 = s^m.
    """
    if m < 2:
        raise BadParams("BS(1, m) needs m >= 2")
    m_frac = Fraction(m)

    def mul(g, h):
        return (g[0] + h[0], g[1] + m_frac ** g[0] * h[1])

    def inv(g):
        return (-g[0], -(m_frac ** -g[0]) * g[1])

    def encode(g):
        x = g[1]
        e = 0
        den = x.denominator
        while den != 1:
            den, r = divmod(den, m)
            if r:
                raise ValueError("denominator is not a power of m")
            e += 1
        num = x.numerator
        return [g[0], num, e]

    def decode(c):
        return (c[0], Fraction(c[1], m ** c[2]))

    gens = [("s", (0, Fraction(1))), ("S", (0, Fraction(-1))),
            ("t", (1, Fraction(0))), ("T", (-1, Fraction(0)))]
    return GroupOracle("bs", (m,), (0, Fraction(0)), mul, inv, encode, gens, decode)


def lamplighter(n: int = 2) -> GroupOracle:
    """(Z/n) wr Z as (sorted tuple of (position, value), cursor)."""
    if n < 2:
        raise BadParams("lamplighter needs n >= 2")

    def mul(g, h):
        lamps = dict(g[0])
        p = g[1]
        for pos, val in h[0]:
            v = (lamps.get(pos + p, 0) + val) % n
            if v:
                lamps[pos + p] = v
            else:
                lamps.pop(pos + p, None)
        return (tuple(sorted(lamps.items())), p + h[1])

    def inv(g):
        p = g[1]
        return (tuple(sorted((pos - p, (-v) % n) for pos, v in g[0])), -p)

    def encode(g):
        return [[list(x) for x in g[0]], g[1]]

    def decode(c):
        return (tuple(tuple(x) for x in c[0]), c[1])

    gens = [("t", ((), 1)), ("T", ((), -1)), ("a", (((0, 1),), 0))]
    if n > 2:
        gens.append(("A", (((0, n - 1),), 0)))
    return GroupOracle("lamplighter", (n,), ((), 0), mul, inv, encode, gens, decode)


def elementary_matrix(n: int, i: int, j: int, k: int = 1):
    return tuple(tuple(1 if r == c else (k if (r, c) == (i - 1, j - 1) else 0)
                       for c in range(n)) for r in range(n))


def matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def sl_n_z(n: int) -> GroupOracle:
    """SL_n(Z) with the elementary matrices e_ij (i != j) and their inverses."""
    if n < 2:
        raise BadParams("SL_n(Z) needs n >= 2")

    def inv(g):
        # integer adjugate; det = 1
        from sympy import Matrix
        m = Matrix(g).adjugate()
        return tuple(tuple(int(x) for x in m.row(r)) for r in range(n))

    def inv_fast(g):
        if n == 2:
            (a, b), (c, d) = g
            return ((d, -b), (-c, a))
        if n == 3:
            (a, b, c), (d, e, f), (g_, h, i) = g
            return ((e * i - f * h, c * h - b * i, b * f - c * e),
                    (f * g_ - d * i, a * i - c * g_, c * d - a * f),
                    (d * h - e * g_, b * g_ - a * h, a * e - b * d))
        return inv(g)

    gens = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                gens.append((f"e{i}{j}", elementary_matrix(n, i, j)))
                gens.append((f"E{i}{j}", elementary_matrix(n, i, j, -1)))
    ident = tuple(tuple(int(r == c) for c in range(n)) for r in range(n))
    return GroupOracle("sl", (n,), ident, matmul, inv_fast,
                       lambda g: [list(r) for r in g], gens,
                       decode=lambda c: tuple(tuple(r) for r in c))


def finite_table(table, generators, family="table", params=()) -> GroupOracle:
    """Finite group from a multiplication table on 0..N-1 with identity 0."""
    order = len(table)
    invs = [next(h for h in range(order) if table[g][h] == 0) for g in range(order)]
    return GroupOracle(family, params, 0, lambda g, h: table[g][h], lambda g: invs[g],
                       int, generators, decode=int)


def dihedral(n: int) -> GroupOracle:
    """Dihedral group of order 2n: element k + n*f is r^k s^f; generators r, R, s."""
    if n < 2:
        raise BadParams("dihedral group needs n >= 2")

    def pair_mul(a, b):
        (k1, f1), (k2, f2) = a, b
        return ((k1 + (-k2 if f1 else k2)) % n, f1 ^ f2)

    elems = [(k, f) for f in (0, 1) for k in range(n)]
    idx = {e: i for i, e in enumerate(elems)}
    table = [[idx[pair_mul(a, b)] for b in elems] for a in elems]
    gens = [("r", idx[(1, 0)]), ("R", idx[(n - 1, 0)]), ("s", idx[(0, 1)])]
    return finite_table(table, gens, "dihedral", (n,))


_FAMILIES = {
    "free": lambda p: free_group(*p),
    "abelian": lambda p: free_abelian(*p),
    "heisenberg": lambda p: heisenberg(),
    "bs": lambda p: bs1m(*p),
    "lamplighter": lambda p: lamplighter(*(p or (2,))),
    "sl": lambda p: sl_n_z(*p),
    "dihedral": lambda p: dihedral(*p),
}


def oracle_from_spec(spec: str) -> GroupOracle:
    """``"free:2"``, ``"abelian:2"``, ``"heisenberg"``, ``"bs:2"``, ``"lamplighter:2"``, ``"sl:3"``, ``"dihedral:4"``."""
    name, *rest = spec.split(":")
    if name not in _FAMILIES:
        raise BadParams(f"unknown group family {name!r}")
    try:
        params = [int(x) for x in rest]
        return _FAMILIES[name](params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name}: {rest}") from exc


# --- balls --------------------------------------------------------------------

class BallTable:
    """Breadth-first word-metric ball around the identity.

    ``entries`` maps element -> (length, parent element, generator label).
    Levels are expanded in (length, key) order and generators in list order,
    which pins down parents uniquely.
    """

    def __init__(self, oracle: GroupOracle):
        self.oracle = oracle
        self.radius = 0
        self.entries = {oracle.identity: (0, None, None)}
        self.order = [oracle.identity]
        self._level = [oracle.identity]

    def __len__(self):
        return len(self.entries)

    def __contains__(self, g):
        return g in self.entries

    def length(self, g):
        return self.entries[g][0]

    def grow(self, radius: int, node_budget: int | None = None) -> "BallTable":
        budget = default_budget() if node_budget is None else node_budget
        if len(self.entries) > budget:
            raise BudgetExceeded(len(self.entries))
        oracle = self.oracle
        mul = oracle.multiply
        gens = oracle.generators
        key = oracle.key
        while self.radius < radius:
            if not self._level:
                self.radius = radius
                break
            new = {}
            length = self.radius + 1
            for g in sorted(self._level, key=key):
                for lab, s in gens:
                    h = mul(g, s)
                    if h in self.entries or h in new:
                        continue
                    new[h] = (length, g, lab)
                    if len(self.entries) + len(new) > budget:
                        raise BudgetExceeded(len(self.entries) + len(new))
            level = sorted(new, key=key)
            self.entries.update((h, new[h]) for h in level)
            self.order.extend(level)
            self._level = level
            self.radius = length
        return self

    def elements(self, radius=None):
        if radius is None:
            return list(self.order)
        return [g for g in self.order if self.entries[g][0] <= radius]

    def sphere_sizes(self):
        sizes = [0] * (self.radius + 1)
        for length, _, _ in self.entries.values():
            sizes[length] += 1
        return sizes

    def ball_sizes(self):
        out, total = [], 0
        for s in self.sphere_sizes():
            total += s
            out.append(total)
        return out

    def word_for(self, g) -> list:
        """Geodesic word (generator labels) recorded by the parent pointers."""
        labels = []
        while True:
            length, parent, lab = self.entries[g]
            if parent is None:
                break
            labels.append(lab)
            g = parent
        return labels[::-1]

    def truncated(self, radius: int) -> "BallTable":
        t = BallTable(self.oracle)
        t.entries = {g: e for g, e in self.entries.items() if e[0] <= radius}
        t.order = [g for g in self.order if self.entries[g][0] <= radius]
        t._level = [g for g in t.order if self.entries[g][0] == radius]
        t.radius = radius
        return t

    def records(self):
        key = self.oracle.key
        rows = []
        for g in self.order:
            length, parent, lab = self.entries[g]
            rows.append({"key": key(g), "len": length,
                         "parent": None if parent is None else key(parent), "letter": lab})
        rows.sort(key=lambda r: (r["len"], r["key"]))
        return rows

    def header(self) -> dict:
        o = self.oracle
        return {"family": o.family, "params": list(o.params),
                "generators": [lab for lab, _ in o.generators], "radius": self.radius}

    def dumps(self) -> str:
        lines = [_compact(self.header())]
        lines.extend(_compact(r) for r in self.records())
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, oracle: GroupOracle | None = None) -> "BallTable":
        lines = text.splitlines()
        head = json.loads(lines[0])
        if oracle is None:
            spec = ":".join([head["family"], *map(str, head["params"])])
            oracle = oracle_from_spec(spec)
        if [lab for lab, _ in oracle.generators] != head["generators"]:
            raise BadParams("cache generator labels do not match the oracle")
        table = cls(oracle)
        by_key = {oracle.key(oracle.identity): oracle.identity}
        table.entries = {}
        table.order = []
        for line in lines[1:]:
            rec = json.loads(line)
            if rec["parent"] is None:
                g = oracle.identity
                entry = (0, None, None)
            else:
                parent = by_key[rec["parent"]]
                g = oracle.multiply(parent, oracle.generator(rec["letter"]))
                entry = (rec["len"], parent, rec["letter"])
            if oracle.key(g) != rec["key"]:
                raise BadParams(f"cache record {rec['key']} does not replay")
            by_key[rec["key"]] = g
            table.entries[g] = entry
            table.order.append(g)
        table.radius = head["radius"]
        table._level = [g for g in table.order if table.entries[g][0] == table.radius]
        return table

    @classmethod
    def load(cls, path, oracle=None) -> "BallTable":
        with open(path) as fh:
            return cls.loads(fh.read(), oracle)


def word_ball(oracle: GroupOracle, radius: int, node_budget: int | None = None) -> BallTable:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return BallTable(oracle).grow(radius, node_budget)


def word_length(oracle: GroupOracle, g, max_radius: int, node_budget: int | None = None) -> int:
    """Exact word length of ``g``, growing the oracle's cached ball as needed."""
    ball = oracle.cached_ball()
    while g not in ball.entries:
        if ball.radius >= max_radius or (not ball._level and ball.radius > 0):
            raise NotFoundWithinRadius(f"{oracle.key(g)} not within radius {max_radius}")
        ball.grow(ball.radius + 1, node_budget)
    return ball.entries[g][0]


def ball_metric_space(oracle: GroupOracle, radius: int, node_budget: int | None = None,
                      label=None) -> FiniteMetricSpace:
    """(B(radius), d_S) with point ids the canonical keys."""
    ball = word_ball(oracle, 2 * radius, node_budget)
    pts = ball.elements(radius)
    invs = [oracle.inverse(g) for g in pts]
    n = len(pts)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = ball.entries[oracle.multiply(invs[i], pts[j])][0]
    return FiniteMetricSpace([oracle.key(g) for g in pts], rows,
                             label or f"{oracle.spec()} ball {radius}")


def distortion_profile(oracle: GroupOracle, z, n_max: int, max_radius: int,
                       node_budget: int | None = None) -> list:
    """[(n, word length of z^n or None if unknown)] for n = 0..n_max."""
    out = []
    for n in range(n_max + 1):
        try:
            out.append((n, word_length(oracle, oracle.power(z, n), max_radius, node_budget)))
        except (NotFoundWithinRadius, BudgetExceeded):
            out.append((n, None))
    return out


def bilipschitz_constants(oracle: GroupOracle, gens1, gens2, radius: int,
                          node_budget: int | None = None):
    """Empirical (c_minus, c_plus) with c_minus d1 <= d2 <= c_plus d1 on B_1(radius)."""
    o1 = oracle.with_generators(gens1)
    o2 = oracle.with_generators(gens2)
    reach = max(radius, 1)
    for src, dst in ((o1, o2), (o2, o1)):
        for lab, s in dst.generators:
            try:
                word_length(src, s, reach, node_budget)
            except NotFoundWithinRadius as exc:
                raise GenerationFailure(f"{lab} not reached by the other generating set") from exc
    stretch = max(word_length(o2, s, reach, node_budget) for _, s in o1.generators)
    ball1 = word_ball(o1, radius, node_budget)
    ball2 = word_ball(o2, radius * stretch, node_budget)
    lo = hi = None
    for g, (l1, _, _) in ball1.entries.items():
        if l1 == 0:
            continue
        q = Fraction(ball2.entries[g][0], l1)
        lo = q if lo is None or q < lo else lo
        hi = q if hi is None or q > hi else hi
    if lo is None:
        return Fraction(1), Fraction(1)
    return lo, hi


# --- step relations -------------------------------------------------------------

class StepRelation:
    """A symmetric set of pairs E on a metric space (the diagonal is implicit)."""

    def __init__(self, base: FiniteMetricSpace, pairs):
        self.base = base
        nbrs = {p: set() for p in base.points}
        for x, y in pairs:
            if x == y:
                continue
            nbrs[x].add(y)
            nbrs[y].add(x)
        self.neighbors = nbrs

    @property
    def pairs(self):
        return {(x, y) for x, ys in self.neighbors.items() for y in ys}

    @classmethod
    def controlled(cls, base: FiniteMetricSpace, c, C, extra=()):
        """All pairs with d <= c, plus ``extra`` pairs, which must have d <= C."""
        pairs = [(base.points[i], base.points[j]) for i, j, d in base.pairs() if leq(d, c)]
        for x, y in extra:
            if not leq(base.dist(x, y), C):
                raise ValueError("extra pair exceeds the upper control C")
            pairs.append((x, y))
        return cls(base, pairs)

    def is_controlled(self, c, C) -> bool:
        b = self.base
        for i, j, d in b.pairs():
            x, y = b.points[i], b.points[j]
            inside = y in self.neighbors[x]
            if leq(d, c) and not inside:
                return False
            if inside and not leq(d, C):
                return False
        return True


def nu_metric(rel: StepRelation) -> FiniteMetricSpace:
    """Hop-count path metric of the relation."""
    pts = rel.base.points
    rows = []
    for s in pts:
        hops = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in rel.neighbors[v]:
                    if w not in hops:
                        hops[w] = hops[v] + 1
                        nxt.append(w)
            frontier = nxt
        if len(hops) != len(pts):
            raise NotConnected("base is not connected by the step relation")
        rows.append([hops[p] for p in pts])
    return FiniteMetricSpace(pts, rows, f"nu({rel.base.label})")


def delta_metric(rel: StepRelation) -> FiniteMetricSpace:
    """Cheapest E-path metric, with steps weighted by the base distance."""
    base = rel.base
    pts = base.points
    index = base.index
    rows = []
    for s in pts:
        dist = {s: 0}
        done = set()
        heap = [(0, index[s])]
        while heap:
            dv, iv = heapq.heappop(heap)
            v = pts[iv]
            if v in done:
                continue
            done.add(v)
            for w in rel.neighbors[v]:
                nd = dv + base.d(iv, index[w])
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, index[w]))
        if len(dist) != len(pts):
            raise NotConnected("base is not connected by the step relation")
        rows.append([dist[p] for p in pts])
    return FiniteMetricSpace(pts, rows, f"delta({base.label})")


def commutator(oracle: GroupOracle, g, h):
    inv = oracle.inverse
    mul = oracle.multiply
    return mul(mul(mul(g, h), inv(g)), inv(h))


__all__ = [
    "GroupOracle", "BallTable", "StepRelation", "DEFAULT_BUDGET",
    "free_group", "free_abelian", "heisenberg", "bs1m", "lamplighter", "sl_n_z",
    "finite_table", "dihedral", "oracle_from_spec", "elementary_matrix", "matmul",
    "word_ball", "word_length", "ball_metric_space", "distortion_profile",
    "bilipschitz_constants", "nu_metric", "delta_metric", "commutator", "default_budget",
]
