"""Rips 2-complexes, combinatorial loops, and certificates about their homotopy.

Simple connectivity is not decidable in general, so loop questions get
three-valued answers: an exact nonzero H1 class is a sound "no", a replayable
move trace down to the constant loop is a sound "yes", anything else is
"unknown".
"""
from __future__ import annotations

import cmath
import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadParams, HypothesisViolated, LoopInvalid, PointOffCircle
from .lattice import IntegerLattice
from .metric import TOL, FiniteMetricSpace, format_number, leq


class Rips2Complex:
    """Flag 2-complex of ``space`` at scale ``c``: edges d <= c, triangles pairwise <= c."""

    def __init__(self, space: FiniteMetricSpace, c):
        if c <= 0:
            raise ValueError("c must be positive")
        self.space = space
        self.c = c
        n = len(space)
        self.vertices = space.points
        self.adj = [set() for _ in range(n)]
        edges = []
        for i, j, dij in space.pairs():
            if leq(dij, c):
                edges.append((i, j))
                self.adj[i].add(j)
                self.adj[j].add(i)
        self.edge_index = edges
        tris = []
        for i, j in edges:
            for k in self.adj[i] & self.adj[j]:
                if k > j:
                    tris.append((i, j, k))
        tris.sort()
        self.triangle_index = tris
        self._tri_set = set(tris)
        self._pi1 = None

    def __repr__(self):
        return (f"Rips2Complex(c={self.c}, V={len(self.vertices)}, "
                f"E={len(self.edge_index)}, T={len(self.triangle_index)})")

    @property
    def edges(self):
        p = self.vertices
        return [(p[i], p[j]) for i, j in self.edge_index]

    @property
    def triangles(self):
        p = self.vertices
        return [(p[i], p[j], p[k]) for i, j, k in self.triangle_index]

    def has_edge(self, x, y) -> bool:
        ix, iy = self.space.index[x], self.space.index[y]
        return iy in self.adj[ix]

    def has_triangle(self, x, y, z) -> bool:
        idx = self.space.index
        return tuple(sorted((idx[x], idx[y], idx[z]))) in self._tri_set

    def neighbors(self, x):
        p = self.vertices
        return [p[j] for j in sorted(self.adj[self.space.index[x]])]

    def components(self) -> list[list]:
        n = len(self.vertices)
        seen = [False] * n
        out = []
        for s in range(n):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [s], [s]
            while stack:
                v = stack.pop()
                for w in self.adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            out.append([self.vertices[i] for i in sorted(comp)])
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def pi1(self) -> "Pi1Data":
        if self._pi1 is None:
            self._pi1 = Pi1Data(self)
        return self._pi1

    def to_json(self) -> dict:
        return {"c": format_number(self.c), "vertices": list(self.vertices),
                "edges": [list(e) for e in self.edges],
                "triangles": [list(t) for t in self.triangles]}


def build_rips(space: FiniteMetricSpace, c) -> Rips2Complex:
    return Rips2Complex(space, c)


class Pi1Data:
    """Spanning forest, non-tree edge coordinates and the triangle relator lattice.

    The edge-path group modulo triangles, abelianized: a loop's class is its
    signed count of non-tree edges, taken modulo the lattice spanned by the
    triangle boundaries.
    """

    def __init__(self, cx: Rips2Complex):
        self.complex = cx
        n = len(cx.vertices)
        self.parent = [-1] * n
        self.root = [-1] * n
        self.depth = [0] * n
        tree = set()
        for s in range(n):
            if self.root[s] >= 0:
                continue
            self.root[s] = s
            frontier = [s]
            while frontier:
                nxt = []
                for v in frontier:
                    for w in sorted(cx.adj[v]):
                        if self.root[w] < 0:
                            self.root[w] = s
                            self.parent[w] = v
                            self.depth[w] = self.depth[v] + 1
                            tree.add((min(v, w), max(v, w)))
                            nxt.append(w)
                frontier = nxt
        self.generators = [e for e in cx.edge_index if e not in tree]
        self.column = {e: k for k, e in enumerate(self.generators)}
        self.relators = [self._tri_row(t) for t in cx.triangle_index]
        self.lattice = IntegerLattice(self.relators)

    def edge_vector(self, i: int, j: int) -> dict:
        """Class of the oriented edge i -> j (vertex indices)."""
        if i < j:
            k = self.column.get((i, j))
            return {} if k is None else {k: 1}
        k = self.column.get((j, i))
        return {} if k is None else {k: -1}

    def _tri_row(self, t):
        i, j, k = t
        vec = {}
        for a, b in ((i, j), (j, k), (k, i)):
            for col, v in self.edge_vector(a, b).items():
                vec[col] = vec.get(col, 0) + v
        return {c: v for c, v in vec.items() if v}

    def path_vector(self, idx_path) -> dict:
        vec = {}
        for a, b in zip(idx_path, idx_path[1:]):
            for col, v in self.edge_vector(a, b).items():
                vec[col] = vec.get(col, 0) + v
        return {c: v for c, v in vec.items() if v}

    def tree_path(self, v: int) -> list:
        """Vertex indices from the component root down to v."""
        out = [v]
        while self.parent[v] >= 0:
            v = self.parent[v]
            out.append(v)
        return out[::-1]

    @property
    def betti1(self) -> int:
        return len(self.generators) - self.lattice.rank

    def invariant_factors(self):
        """Torsion coefficients of H1 (entries > 1 of the Smith normal form)."""
        from sympy import Matrix
        from sympy.matrices.normalforms import invariant_factors

        rows = self.lattice.dense_rows(len(self.generators))
        if not rows:
            return []
        return [int(f) for f in invariant_factors(Matrix(rows)) if abs(int(f)) > 1]


def _loop_indices(cx: Rips2Complex, loop) -> list:
    idx = cx.space.index
    try:
        seq = [idx[v] for v in loop]
    except KeyError as exc:
        raise LoopInvalid(f"unknown vertex {exc.args[0]!r}") from exc
    if not seq:
        raise LoopInvalid("empty loop")
    if seq[0] != seq[-1]:
        raise LoopInvalid("loop is not closed")
    for a, b in zip(seq, seq[1:]):
        if b not in cx.adj[a]:
            raise LoopInvalid(f"{cx.vertices[a]!r} -> {cx.vertices[b]!r} is not an edge")
    return seq


@dataclass(frozen=True)
class H1Class:
    vector: dict
    reduced: dict

    @property
    def is_zero(self) -> bool:
        return not self.reduced


def h1_class(cx: Rips2Complex, loop) -> H1Class:
    seq = _loop_indices(cx, loop)
    data = cx.pi1()
    vec = data.path_vector(seq)
    return H1Class(vec, data.lattice.reduce(vec))


# --- homotopy moves -----------------------------------------------------------

def neighbor_loops(cx: Rips2Complex, loop: tuple, max_len=None):
    """All loops one elementary graph or triangle move away (vertex indices)."""
    n = len(loop)
    adj = cx.adj
    tri = cx._tri_set
    out = []
    for i in range(1, n - 1):
        a, u, b = loop[i - 1], loop[i], loop[i + 1]
        if a == b:
            out.append(loop[:i] + loop[i + 2:])
        elif tuple(sorted((a, u, b))) in tri:
            out.append(loop[:i] + loop[i + 1:])
    if max_len is not None and n + 1 > max_len:
        return out
    for i in range(n - 1):
        a, b = loop[i], loop[i + 1]
        for u in sorted(adj[a] & adj[b]):
            out.append(loop[:i + 1] + (u,) + loop[i + 1:])
    if max_len is not None and n + 2 > max_len:
        return out
    for i in range(n):
        a = loop[i]
        for u in sorted(adj[a]):
            out.append(loop[:i + 1] + (u, a) + loop[i + 1:])
    return out


def is_elementary_move(cx: Rips2Complex, xi, eta) -> bool:
    """True if the two loops (point ids) differ by one graph or triangle move."""
    try:
        _loop_indices(cx, xi)
        _loop_indices(cx, eta)
    except LoopInvalid:
        return False
    a, b = tuple(xi), tuple(eta)
    if len(a) > len(b):
        a, b = b, a
    if len(b) == len(a) + 1:
        # triangle move: x u y <-> x y with {x, u, y} a 2-simplex
        return any(b[:i] + b[i + 1:] == a and len({b[i - 1], b[i], b[i + 1]}) == 3
                   and cx.has_triangle(b[i - 1], b[i], b[i + 1])
                   for i in range(1, len(b) - 1))
    if len(b) == len(a) + 2:
        # graph move: x u x <-> x
        return any(b[i - 1] == b[i + 1] and b[:i] + b[i + 2:] == a
                   for i in range(1, len(b) - 1))
    return False


@dataclass
class ContractionVerdict:
    """``trace`` lists the loops after each move; the start loop is not repeated."""

    verdict: str                      # "contracted" | "nontrivial_h1" | "unknown"
    trace: list | None = None
    certificate: dict | None = None
    explored: int = 0

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "explored": self.explored}
        if self.trace is not None:
            out["trace"] = [list(t) for t in self.trace]
        if self.certificate is not None:
            out["certificate"] = {str(k): v for k, v in sorted(self.certificate.items())}
        return out


def contract_loop(cx: Rips2Complex, loop, move_budget: int = 100_000,
                  max_extra: int = 4) -> ContractionVerdict:
    """Search for a null-homotopy of ``loop`` by elementary moves.

    Shortest loops are expanded first (ties in discovery order); loops longer
    than the input by more than ``max_extra`` vertices are not explored.
    """
    seq = tuple(_loop_indices(cx, loop))
    cls = h1_class(cx, loop)
    if not cls.is_zero:
        return ContractionVerdict("nontrivial_h1", certificate=cls.reduced)
    pts = cx.vertices
    goal = (seq[0],)
    parent = {seq: None}
    heap = [(len(seq), 0, seq)]
    counter = 1
    explored = 0
    max_len = len(seq) + max_extra
    found = seq == goal
    while heap and not found:
        _, _, cur = heapq.heappop(heap)
        explored += 1
        if explored > move_budget:
            return ContractionVerdict("unknown", explored=explored - 1)
        for nxt in neighbor_loops(cx, cur, max_len):
            if nxt in parent:
                continue
            parent[nxt] = cur
            if nxt == goal:
                found = True
                break
            heapq.heappush(heap, (len(nxt), counter, nxt))
            counter += 1
    if not found:
        return ContractionVerdict("unknown", explored=explored)
    trace = []
    node = goal
    while node != seq:
        trace.append(tuple(pts[i] for i in node))
        node = parent[node]
    trace.reverse()
    return ContractionVerdict("contracted", trace=trace, explored=explored)


def replay_trace(cx: Rips2Complex, loop, trace) -> bool:
    """Check that ``trace`` walks from ``loop`` to the constant loop one move at a time."""
    steps = [tuple(loop)] + [tuple(t) for t in trace]
    if len(steps[-1]) != 1:
        return False
    return all(is_elementary_move(cx, a, b) for a, b in zip(steps, steps[1:]))


# --- coarse homotopy of c-paths ------------------------------------------------

def is_c_path(space: FiniteMetricSpace, path, c) -> bool:
    return all(leq(space.dist(a, b), c) for a, b in zip(path, path[1:]))


def c_elementarily_homotopic(space: FiniteMetricSpace, xi, eta, c) -> bool:
    """Same ends, both c-paths, and one is the other with one point inserted."""
    a, b = tuple(xi), tuple(eta)
    if a[0] != b[0] or a[-1] != b[-1]:
        return False
    if not (is_c_path(space, a, c) and is_c_path(space, b, c)):
        return False
    if len(a) > len(b):
        a, b = b, a
    if len(b) != len(a) + 1:
        return False
    return any(b[:i] + b[i + 1:] == a for i in range(1, len(b) - 1))


def interleave_homotopy(space: FiniteMetricSpace, xi, eta, c) -> list:
    """Ladder of 2n - 2 paths from xi to eta, consecutive ones 2c-elementarily homotopic.

    Row 2k-1 is (y_0..y_k, x_k..x_n) and row 2k is (y_0..y_k, x_{k+1}..x_n); the
    last row equals eta.
    """
    xi, eta = tuple(xi), tuple(eta)
    if len(xi) != len(eta):
        raise HypothesisViolated(-1, "paths have different numbers of steps")
    n = len(xi) - 1
    if xi[0] != eta[0]:
        raise HypothesisViolated(0, "paths start at different points")
    if xi[-1] != eta[-1]:
        raise HypothesisViolated(n, "paths end at different points")
    for i, (a, b) in enumerate(zip(xi, xi[1:])):
        if not leq(space.dist(a, b), c):
            raise HypothesisViolated(i + 1, f"xi is not a {c}-path at step {i + 1}")
    for i, (a, b) in enumerate(zip(eta, eta[1:])):
        if not leq(space.dist(a, b), c):
            raise HypothesisViolated(i + 1, f"eta is not a {c}-path at step {i + 1}")
    for i in range(1, n):
        if not leq(space.dist(xi[i], eta[i]), c):
            raise HypothesisViolated(i, f"d(x_{i}, y_{i}) exceeds {c}")
    rows = []
    for k in range(1, n):
        rows.append(eta[:k + 1] + xi[k:])
        rows.append(eta[:k + 1] + xi[k + 1:])
    prev = xi
    for j, row in enumerate(rows, start=1):
        if not c_elementarily_homotopic(space, prev, row, 2 * c):
            raise HypothesisViolated(j, f"ladder row {j} is not a 2c-elementary move")
        prev = row
    return rows


# --- SC(c', c'') probe -------------------------------------------------------

def random_loop(cx: Rips2Complex, base, steps: int, rng: random.Random) -> tuple:
    """Random walk of ``steps`` edges from ``base``, closed up through the spanning tree root."""
    idx = cx.space.index
    pts = cx.vertices
    v = idx[base]
    walk = [v]
    for _ in range(steps):
        nbrs = sorted(cx.adj[v])
        if not nbrs:
            break
        v = rng.choice(nbrs)
        walk.append(v)
    data = cx.pi1()
    # v -> root -> base along the spanning tree; backtracks are kept on purpose
    path = walk + data.tree_path(v)[::-1][1:] + data.tree_path(walk[0])[1:]
    out = [path[0]]
    for x in path[1:]:
        if x != out[-1]:
            out.append(x)
    return tuple(pts[i] for i in out)


@dataclass
class SCReport:
    base: object
    c_prime: object
    c_second: object
    loops: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    h1_map_nonzero: bool = False
    image_rank: int = 0
    status: str = "inconclusive"     # "fails" | "holds_on_sample" | "inconclusive"

    def to_json(self) -> dict:
        return {
            "base": self.base, "c_prime": format_number(self.c_prime),
            "c_second": format_number(self.c_second),
            "loops": [list(l) for l in self.loops],
            "verdicts": [v.verdict for v in self.verdicts],
            "h1_map_nonzero": self.h1_map_nonzero, "image_rank": self.image_rank,
            "sc": self.status,
        }


def h1_map(small: Rips2Complex, large: Rips2Complex, base=None):
    """Images in H1(large) of the fundamental cycles of ``small``.

    Returns ``(images, image_rank)``; when ``base`` is given only the component
    of ``base`` in ``small`` is used.
    """
    d_small = small.pi1()
    d_large = large.pi1()
    root = None if base is None else d_small.root[small.space.index[base]]
    images = []
    for i, j in d_small.generators:
        if root is not None and d_small.root[i] != root:
            continue
        cycle = d_small.tree_path(i) + d_small.tree_path(j)[::-1]
        images.append(d_large.lattice.reduce(d_large.path_vector(cycle)))
    lat = d_large.lattice.copy()
    before = lat.rank
    for v in images:
        lat.add(v)
    return images, lat.rank - before


def sc_probe(space: FiniteMetricSpace, x0, c_prime, c_second, loop_sample_size: int = 32,
             move_budget: int = 100_000, seed: int = 0, max_walk: int = 12) -> SCReport:
    if c_second < c_prime or c_prime <= 0:
        raise BadParams("need c_second >= c_prime > 0")
    small = Rips2Complex(space, c_prime)
    large = small if c_second == c_prime else Rips2Complex(space, c_second)
    rng = random.Random(seed)
    loops = [(x0,)]
    while len(loops) < loop_sample_size:
        loops.append(random_loop(small, x0, rng.randint(1, max_walk), rng))
    verdicts = [contract_loop(large, lp, move_budget) for lp in loops]
    images, rank = h1_map(small, large, x0)
    nonzero = any(images)
    report = SCReport(x0, c_prime, c_second, loops, verdicts, nonzero, rank)
    if nonzero or any(v.verdict == "nontrivial_h1" for v in verdicts):
        report.status = "fails"
    elif all(v.verdict == "contracted" for v in verdicts):
        report.status = "holds_on_sample"
    return report


# --- rotation number on a circle -----------------------------------------------

@dataclass(frozen=True)
class RotationCertificate:
    counts: tuple          # counts[a][b] = steps from arc a to arc b
    rho: int
    R: object
    arcs: tuple

    def to_json(self) -> dict:
        return {"rho": self.rho, "counts": [list(r) for r in self.counts],
                "R": format_number(self.R), "arcs": list(self.arcs)}


def _arc_of_index(j, m):
    if not isinstance(j, int):
        raise PointOffCircle(f"index {j!r} is not an integer")
    return (3 * (j % m)) // m


def _arc_of_point(z, R):
    if abs(abs(z) - R) > TOL * max(1.0, float(R)):
        raise PointOffCircle(f"{z!r} is not on the circle of radius {R}")
    theta = cmath.phase(z) % (2 * math.pi)
    return min(int(3 * theta / (2 * math.pi)), 2)


def rotation_number(loop, R=1.0, m: int | None = None) -> RotationCertificate:
    """Count steps between the three half-open arcs of C_R and return rho.

    With ``m`` given, loop entries are indices j standing for R e^{2 pi i j/m}
    (arcs computed exactly); otherwise entries are complex numbers on C_R.
    A closed loop (first == last) is read cyclically without the repeat.
    """
    pts = list(loop)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    arcs = [(_arc_of_index(p, m) if m is not None else _arc_of_point(p, R)) for p in pts]
    counts = [[0, 0, 0] for _ in range(3)]
    n = len(arcs)
    for j in range(n):
        counts[arcs[j]][arcs[(j + 1) % n]] += 1
    rho = sum(counts[a][(a + 1) % 3] - counts[(a + 1) % 3][a] for a in range(3))
    return RotationCertificate(tuple(tuple(r) for r in counts), rho, R, tuple(arcs))


# --- fixtures ---------------------------------------------------------------------

def circle_fixture(R=1, m: int = 6) -> FiniteMetricSpace:
    """m equally spaced points on C_R with the chordal metric."""
    if m < 3:
        raise BadParams("circle fixture needs m >= 3")
    if R <= 0:
        raise BadParams("circle fixture needs R > 0")
    chord = [2 * R * math.sin(math.pi * k / m) for k in range(m)]
    rows = [[0.0 if i == j else chord[abs(i - j)] for j in range(m)] for i in range(m)]
    return FiniteMetricSpace(range(m), rows, f"circle(R={R},m={m})")


def highway_fixture(n_max: int = 2) -> FiniteMetricSpace:
    """The points u_0 .. u_{10^n_max + 3 n_max} of the highway graph, with its graph metric.

    Consecutive u's are joined by an edge, and for 1 <= n <= n_max a detour of
    n edges joins u_{10^n} to u_{10^n + 3n}.  Point ids are the integers n.
    """
    if n_max < 2:
        raise BadParams("highway fixture needs n_max >= 2")
    top = 10 ** n_max + 3 * n_max
    nodes = [("u", k) for k in range(top + 1)]
    adj = {v: [] for v in nodes}

    def link(a, b):
        adj[a].append(b)
        adj[b].append(a)

    for k in range(top):
        link(("u", k), ("u", k + 1))
    for n in range(1, n_max + 1):
        chain = [("u", 10 ** n)] + [("v", n, i) for i in range(1, n)] + [("u", 10 ** n + 3 * n)]
        for v in chain:
            adj.setdefault(v, [])
        for a, b in zip(chain, chain[1:]):
            link(a, b)
    rows = []
    for k in range(top + 1):
        dist = {("u", k): 0}
        frontier = [("u", k)]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        rows.append([dist[("u", j)] for j in range(top + 1)])
    return FiniteMetricSpace(range(top + 1), rows, f"highway(n_max={n_max})")


def line_fixture(radius: int) -> FiniteMetricSpace:
    """The integer ball {-radius..radius} with |x - y|."""
    pts = list(range(-radius, radius + 1))
    return FiniteMetricSpace.from_line(pts, pts, f"Z ball {radius}")


def fixture(name: str, params: dict | None = None) -> FiniteMetricSpace:
    params = dict(params or {})
    try:
        if name == "circle":
            return circle_fixture(_num(params.get("R", 1)), int(params.get("m", 6)))
        if name == "highway":
            return highway_fixture(int(params.get("n_max", 2)))
        if name == "line":
            return line_fixture(int(params.get("radius", 3)))
    except (TypeError, ValueError) as exc:
        raise BadParams(str(exc)) from exc
    raise BadParams(f"unknown fixture {name!r}")


def _num(x):
    if isinstance(x, str):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else float(f)
    return x
