"""Growth of balls, the growth preorder, metric lattices and Følner probes.

Sources for balls are a :class:`GroupOracle` (word metric, counted around the
identity), a :class:`BallTable`, or a :class:`FiniteMetricSpace`.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import BudgetExceeded, DegreeTooSmall, NotATree, TooFewSamples
from .groups import BallTable, GroupOracle, default_budget, word_ball
from .metric import FiniteMetricSpace, format_number, leq, lt

DEFAULT_LAMBDAS = (1, 2, 4, 8)
DEFAULT_MUS = (1, 2, 4, 8)
DEFAULT_CS = (0, 1, 2, 4)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# --- growth series ----------------------------------------------------------------

@dataclass(frozen=True)
class GrowthSeries:
    """Samples (r, |B(r)|); ``limit`` is the largest radius the counts are known for."""

    samples: tuple
    label: str = ""
    limit: object = None

    def __post_init__(self):
        rs = [r for r, _ in self.samples]
        if any(not lt(a, b) for a, b in zip(rs, rs[1:])):
            raise ValueError("radii must be strictly increasing")
        counts = [c for _, c in self.samples]
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("counts must be nondecreasing")
        if self.limit is None:
            object.__setattr__(self, "limit", rs[-1] if rs else 0)

    @classmethod
    def from_function(cls, fn, radii, label=""):
        return cls(tuple((r, fn(r)) for r in radii), label)

    @property
    def radii(self):
        return [r for r, _ in self.samples]

    @property
    def counts(self):
        return [c for _, c in self.samples]

    def __call__(self, x):
        """Step evaluation: count at the largest sampled radius <= x."""
        if self.samples and lt(self.limit, x):
            raise ValueError(f"radius {x} is beyond the sampled range")
        best = None
        for r, c in self.samples:
            if leq(r, x):
                best = c
            else:
                break
        if best is None:
            raise ValueError(f"radius {x} is below the sampled range")
        return best

    def to_json(self) -> dict:
        return {"label": self.label, "limit": format_number(self.limit),
                "samples": [[format_number(r), c] for r, c in self.samples]}

    def to_csv(self) -> str:
        lines = ["r,count"] + [f"{format_number(r)},{c}" for r, c in self.samples]
        return "\n".join(lines) + "\n"


def growth_series(source, base=None, r_max=8, node_budget=None) -> GrowthSeries:
    """Exact ball counts around ``base`` (around the identity for groups)."""
    if isinstance(source, GroupOracle):
        source = word_ball(source, r_max, node_budget)
    if isinstance(source, BallTable):
        source.grow(r_max, node_budget)
        sizes = source.ball_sizes()
        return GrowthSeries(tuple((r, sizes[min(r, len(sizes) - 1)]) for r in range(r_max + 1)),
                            source.oracle.spec(), r_max)
    space: FiniteMetricSpace = source
    i = space.index[space.points[0] if base is None else base]
    dists = sorted(d for d in space.row(i) if leq(d, r_max))
    samples = []
    for d in dists:
        if samples and not lt(samples[-1][0], d):
            samples[-1] = (samples[-1][0], samples[-1][1] + 1)
        else:
            samples.append((d, (samples[-1][1] if samples else 0) + 1))
    return GrowthSeries(tuple(samples), space.label, r_max)


# --- the growth preorder ----------------------------------------------------------

@dataclass(frozen=True)
class GrowthWitness:
    """beta(r) <= lam * beta'(mu * r + c) for every checked r."""

    lam: object
    mu: object
    c: object
    checked: tuple = ()

    def to_json(self) -> dict:
        body = {"lambda": format_number(self.lam), "mu": format_number(self.mu),
                "c": format_number(self.c), "checked": [format_number(r) for r in self.checked]}
        body["digest"] = _digest(body)
        return body


@dataclass(frozen=True)
class NoWitnessInGrid:
    """No grid triple works on the sampled range.  This is not a disproof."""

    grid: dict

    def to_json(self) -> dict:
        return {"verdict": "no_witness_in_grid", "grid": self.grid}


def check_witness(beta: GrowthSeries, beta_prime: GrowthSeries, lam, mu, c, min_points=3):
    """Radii at which the inequality was checked, or None if it fails somewhere.

    Only radii with mu*r + c inside the range of ``beta_prime`` can be checked.
    """
    checked = []
    for r, count in beta.samples:
        x = mu * r + c
        if lt(beta_prime.limit, x):
            continue
        if count > lam * beta_prime(x):
            return None
        checked.append(r)
    if len(checked) < min_points:
        return None
    return tuple(checked)


def compare_growth(beta: GrowthSeries, beta_prime: GrowthSeries, lambdas=DEFAULT_LAMBDAS,
                   mus=DEFAULT_MUS, cs=DEFAULT_CS, min_points=3):
    """First grid witness for beta <= beta', searching lambda, then c, then mu."""
    for lam, c, mu in product(lambdas, cs, mus):
        checked = check_witness(beta, beta_prime, lam, mu, c, min_points)
        if checked is not None:
            return GrowthWitness(lam, mu, c, checked)
    return NoWitnessInGrid({"lambda": list(lambdas), "mu": list(mus), "c": list(cs)})


def compose_witnesses(w1: GrowthWitness, w2: GrowthWitness) -> GrowthWitness:
    """From beta <= beta' (w1) and beta' <= beta'' (w2), a witness for beta <= beta''."""
    return GrowthWitness(w1.lam * w2.lam, w1.mu * w2.mu, w2.mu * w1.c + w2.c)


@dataclass(frozen=True)
class PoldegEstimate:
    degree: float
    residual: float
    exponential: bool
    samples_used: int

    def to_json(self) -> dict:
        return {"degree": round(self.degree, 12), "residual": round(self.residual, 12),
                "exponential": self.exponential, "samples_used": self.samples_used}


def _fit(x, y):
    if np.ptp(x) == 0:
        return 0.0, 0.0
    slope, intercept = np.polyfit(x, y, 1)
    res = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(res ** 2)))


def poldeg_estimate(beta: GrowthSeries, tail_fraction: float = 0.5) -> PoldegEstimate:
    """Slope of log count against log r over the trailing part of the samples.

    The series is flagged exponential when log count is fitted better by a
    line in r than by a line in log r.
    """
    pts = [(float(r), float(c)) for r, c in beta.samples if r >= 2]
    if len(pts) < 4:
        raise TooFewSamples(f"need 4 samples with r >= 2, got {len(pts)}")
    k = max(3, math.ceil(tail_fraction * len(pts)))
    tail = np.array(pts[-k:])
    r, c = tail[:, 0], np.log(tail[:, 1])
    slope, res_log = _fit(np.log(r), c)
    _, res_lin = _fit(r, c)
    exponential = res_lin < res_log and res_log > 1e-3
    return PoldegEstimate(slope, res_log, bool(exponential), k)


# --- metric lattices --------------------------------------------------------------

def greedy_lattice(space: FiniteMetricSpace, c, seed=None) -> list:
    """Scan the seed, then all points in id order, keeping those >= c from every kept point."""
    if c <= 0:
        raise ValueError("c must be positive")
    order = list(space.points)
    if seed is None:
        seed = order[0]
    order.remove(seed)
    chosen = [seed]
    for x in order:
        if all(not lt(space.dist(x, y), c) for y in chosen):
            chosen.append(x)
    rank = space.index
    return sorted(chosen, key=rank.__getitem__)


def lattice_check(space: FiniteMetricSpace, lattice, c):
    """(pairwise >= c, max distance from a point to the lattice)."""
    sep = all(not lt(space.dist(a, b), c) for i, a in enumerate(lattice) for b in lattice[i + 1:])
    cover = max((min(space.dist(x, y) for y in lattice) for x in space.points), default=0)
    return sep, cover


# --- Følner sets ----------------------------------------------------------------------

@dataclass(frozen=True)
class FolnerWitness:
    F: tuple
    r: int
    ratio: Fraction
    strategy: str = ""

    def to_json(self) -> dict:
        body = {"verdict": "witness", "F": list(self.F), "size": len(self.F), "r": self.r,
                "ratio": format_number(self.ratio), "strategy": self.strategy}
        body["digest"] = _digest(body["F"])
        return body


@dataclass(frozen=True)
class NoWitnessWithinBudget:
    strategy: str
    explored: int
    exhausted: bool
    best_ratio: Fraction | None = None

    def to_json(self) -> dict:
        return {"verdict": "no_witness_within_budget", "strategy": self.strategy,
                "explored": self.explored, "exhausted": self.exhausted,
                "best_ratio": None if self.best_ratio is None else format_number(self.best_ratio)}


class _GroupView:
    """Cayley graph of a group oracle, with elements named by their keys."""

    def __init__(self, oracle: GroupOracle, table: BallTable | None = None):
        self.oracle = oracle
        self.table = table if table is not None else oracle.cached_ball()
        self._elem = {}

    def name(self, g):
        k = self.oracle.key(g)
        self._elem[k] = g
        return k

    def base(self):
        return self.name(self.oracle.identity)

    def neighbors(self, x):
        g = self._elem[x]
        return [self.name(self.oracle.multiply(g, s)) for _, s in self.oracle.generators]

    def ball(self, r):
        self.table.grow(r)
        return [self.name(g) for g in self.table.elements(r)]

    def thicken(self, F, r):
        self.table.grow(r)
        mul = self.oracle.multiply
        ball = self.table.elements(r)
        return {self.oracle.key(mul(self._elem[x], b)) for x in F for b in ball}


class _SpaceView:
    """A finite metric space; adjacency is distance in (0, 1]."""

    def __init__(self, space: FiniteMetricSpace, base=None):
        self.space = space
        self._base = space.points[0] if base is None else base

    def base(self):
        return self._base

    def neighbors(self, x):
        return [y for y in self.space.points if y != x and leq(self.space.dist(x, y), 1)]

    def ball(self, r):
        return [y for y in self.space.points if leq(self.space.dist(self._base, y), r)]

    def thicken(self, F, r):
        pts = self.space.points
        return {y for y in pts if any(leq(self.space.dist(x, y), r) for x in F)}


def _view(source, base=None):
    if isinstance(source, GroupOracle):
        return _GroupView(source)
    if isinstance(source, BallTable):
        return _GroupView(source.oracle, source)
    return _SpaceView(source, base)


def folner_ratio(source, F, r) -> Fraction:
    """|B^F(r)| / |F| computed from scratch."""
    view = _view(source)
    if isinstance(view, _GroupView):
        for k in F:
            view._elem.setdefault(k, view.oracle.decode(json.loads(k)) if view.oracle.decode
                                  else _lookup(view, k))
    return Fraction(len(view.thicken(list(F), r)), len(F))


def _lookup(view: _GroupView, k):
    for g in view.table.order:
        if view.oracle.key(g) == k:
            return g
    raise KeyError(k)


def enumerate_connected(root, neighbors, max_size: int, budget: int | None = None):
    """Yield every connected vertex set containing ``root`` with at most ``max_size`` vertices.

    Extension-set enumeration: a set grows only by vertices from its own
    extension list, and a vertex passed over is never offered again below
    that branch, so each set is produced exactly once.
    """
    budget = default_budget() if budget is None else budget
    count = 1
    yield (root,)
    start = tuple(w for w in dict.fromkeys(neighbors(root)) if w != root)
    stack = [((root,), start, frozenset((root,) + start))]
    while stack:
        cur, ext, seen = stack.pop()
        for i in range(len(ext) - 1, -1, -1):
            v = ext[i]
            child = cur + (v,)
            count += 1
            if count > budget:
                raise BudgetExceeded(count)
            yield child
            if len(child) < max_size:
                new = tuple(w for w in dict.fromkeys(neighbors(v)) if w not in seen)
                stack.append((child, ext[i + 1:] + new, seen | set(new)))


def tree_shapes(max_size: int, max_degree: int):
    """Unlabelled trees with at most ``max_size`` vertices and degrees <= ``max_degree``.

    Trees are adjacency tuples on 0..n-1, one per isomorphism class, grown by
    adding leaves and deduplicated by a centre-rooted canonical string.
    """
    level = {_canonical(((),)): ((),)}
    out = [((),)]
    for _ in range(max_size - 1):
        nxt = {}
        for adj in level.values():
            n = len(adj)
            for v in range(n):
                if len(adj[v]) >= max_degree:
                    continue
                grown = tuple(a + ((n,) if u == v else ()) for u, a in enumerate(adj)) + ((v,),)
                nxt.setdefault(_canonical(grown), grown)
        level = dict(sorted(nxt.items()))
        out.extend(level.values())
    return out


def _canonical(adj) -> str:
    n = len(adj)
    if n == 1:
        return "()"
    deg = [len(a) for a in adj]
    leaves = [v for v in range(n) if deg[v] <= 1]
    left = n
    while left > 2:
        left -= len(leaves)
        nl = []
        for v in leaves:
            for w in adj[v]:
                deg[w] -= 1
                if deg[w] == 1:
                    nl.append(w)
        leaves = nl
    return min(_encode(adj, c, -1) for c in leaves)


def _encode(adj, v, parent) -> str:
    return "(" + "".join(sorted(_encode(adj, w, v) for w in adj[v] if w != parent)) + ")"


def _embed_tree(view: _GroupView, adj) -> tuple:
    """Place a tree shape in the Cayley tree of a free group, root at the identity."""
    oracle = view.oracle
    gens = oracle.generators
    inv = {lab: oracle.inverse_label(lab) for lab, _ in gens}
    elem = {0: oracle.identity}
    came = {0: None}
    order = [0]
    for v in order:
        free = [lab for lab, _ in gens if lab != came[v]]
        kids = [w for w in adj[v] if w not in elem]
        for w, lab in zip(kids, free):
            elem[w] = oracle.multiply(elem[v], oracle.generator(lab))
            came[w] = inv[lab]
            order.append(w)
    return tuple(view.name(elem[v]) for v in range(len(adj)))


def folner_search(source, r: int = 1, epsilon=Fraction(1, 2), strategy: str = "balls",
                  budget: int | None = None, max_size: int = 12, base=None):
    """Look for a finite F with |B^F(r)| / |F| <= 1 + epsilon.

    ``balls`` tries F = B(k) for k = 0, 1, ...; ``greedy`` grows F one
    neighbour at a time, always taking the smallest resulting ratio;
    ``exhaustive`` tries every connected F through the base point with
    |F| <= max_size, by increasing size.  On a free group the exhaustive
    search runs over tree shapes, since any finite subtree of a regular tree
    can be moved by an automorphism to contain the identity in a fixed way.
    """
    budget = default_budget() if budget is None else budget
    epsilon = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(epsilon).limit_denominator(10 ** 9)
    bound = 1 + epsilon
    view = _view(source, base)
    explored = 0
    best = None

    def ratio(F):
        return Fraction(len(view.thicken(F, r)), len(F))

    if strategy == "balls":
        k = 0
        prev = -1
        while explored < budget:
            F = view.ball(k)
            if len(F) == prev:
                return NoWitnessWithinBudget(strategy, explored, True, best)
            prev = len(F)
            explored += 1
            q = ratio(F)
            best = q if best is None else min(best, q)
            if q <= bound:
                return FolnerWitness(tuple(sorted(F)), r, q, strategy)
            if len(F) > budget:
                break
            k += 1
        return NoWitnessWithinBudget(strategy, explored, False, best)

    if strategy == "greedy":
        F = [view.base()]
        while explored < budget:
            q = ratio(F)
            best = q if best is None else min(best, q)
            if q <= bound:
                return FolnerWitness(tuple(sorted(F)), r, q, strategy)
            if len(F) >= max_size:
                return NoWitnessWithinBudget(strategy, explored, False, best)
            inside = set(F)
            cands = sorted({w for x in F for w in view.neighbors(x) if w not in inside})
            if not cands:
                return NoWitnessWithinBudget(strategy, explored, True, best)
            scored = []
            for w in cands:
                explored += 1
                scored.append((ratio(F + [w]), w))
            F.append(min(scored)[1])
        return NoWitnessWithinBudget(strategy, explored, False, best)

    if strategy == "exhaustive":
        if isinstance(view, _GroupView) and view.oracle.family == "free":
            degree = len(view.oracle.generators)
            candidates = (_embed_tree(view, adj) for adj in tree_shapes(max_size, degree))
        else:
            candidates = sorted(enumerate_connected(view.base(), view.neighbors, max_size, budget),
                                key=lambda F: (len(F), sorted(F)))
        for F in candidates:
            explored += 1
            if explored > budget:
                return NoWitnessWithinBudget(strategy, explored - 1, False, best)
            q = ratio(list(F))
            best = q if best is None else min(best, q)
            if q <= bound:
                return FolnerWitness(tuple(sorted(F)), r, q, strategy)
        return NoWitnessWithinBudget(strategy, explored, True, best)

    raise ValueError(f"unknown strategy {strategy!r}")


# --- trees ------------------------------------------------------------------------------

class Tree:
    """Finite tree given by adjacency lists; validated once at construction."""

    def __init__(self, adjacency: dict):
        self.adj = {v: tuple(ws) for v, ws in adjacency.items()}
        n = len(self.adj)
        m = sum(len(ws) for ws in self.adj.values())
        if m % 2 or m // 2 != n - 1:
            raise NotATree(f"{n} vertices but {m // 2} edges")
        if n:
            start = next(iter(self.adj))
            seen = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for w in self.adj[v]:
                    if w not in self.adj:
                        raise NotATree(f"edge to unknown vertex {w!r}")
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != n:
                raise NotATree("graph is not connected")

    def __len__(self):
        return len(self.adj)

    def degree(self, v) -> int:
        return len(self.adj[v])

    def neighbors(self, v):
        return self.adj[v]


def regular_tree(degree: int = 3, depth: int = 12) -> Tree:
    """Ball of radius ``depth`` around vertex 0 in the ``degree``-regular tree."""
    adj = {0: []}
    frontier = [0]
    nxt_id = 1
    for d in range(depth):
        new = []
        for v in frontier:
            for _ in range(degree if v == 0 else degree - 1):
                adj[v].append(nxt_id)
                adj[nxt_id] = [v]
                new.append(nxt_id)
                nxt_id += 1
        frontier = new
    return Tree(adj)


def tree_boundary_check(tree: Tree, U, min_degree: int = 3):
    """(|boundary of U|, |boundary| >= |U|/2); the boundary is the set of
    vertices of U with a neighbour outside U."""
    if not isinstance(tree, Tree):
        tree = Tree(tree)
    inside = set(U)
    for v in inside:
        if tree.degree(v) < min_degree:
            raise DegreeTooSmall(f"vertex {v!r} has degree {tree.degree(v)}")
    boundary = sum(1 for v in inside if any(w not in inside for w in tree.neighbors(v)))
    return boundary, 2 * boundary >= len(inside)
