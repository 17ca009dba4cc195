"""Presentations, the defining-subset transform, HNN and amalgam presentations,
and the arithmetic classifiers for Z[1/P] semidirect products.

Words are tuples of ``(letter, +1 | -1)`` pairs.  In JSON they are written as
runs ``[letter, exponent]`` with any nonzero integer exponent.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction


from .errors import (BadN, BadParams, BudgetExceeded, DimensionMismatch, LetterClash,
                     NoEvaluation, NotAUnit)
from .groups import GroupOracle, default_budget, dihedral, oracle_from_spec, sl_n_z, word_ball

CONVENTION = "tkt^-1=phi(k)"


# --- words --------------------------------------------------------------------

def reduce_word(word) -> tuple:
    out = []
    for a, e in word:
        if out and out[-1][0] == a and out[-1][1] == -e:
            out.pop()
        else:
            out.append((a, e))
    return tuple(out)


def inverse_word(word) -> tuple:
    return tuple((a, -e) for a, e in reversed(word))


def expand_runs(runs) -> tuple:
    """``[[letter, k], ...]`` -> unit-exponent word."""
    out = []
    for a, k in runs:
        k = int(k)
        out.extend([(a, 1 if k > 0 else -1)] * abs(k))
    return tuple(out)


def to_runs(word) -> list:
    runs = []
    for a, e in word:
        if runs and runs[-1][0] == a and (runs[-1][1] > 0) == (e > 0):
            runs[-1][1] += e
        else:
            runs.append([a, e])
    return runs


def power_word(word, k: int) -> tuple:
    return tuple(word) * k if k >= 0 else inverse_word(word) * (-k)


def commutator_word(x, y) -> tuple:
    """[x, y] = x y x^-1 y^-1."""
    return tuple(x) + tuple(y) + inverse_word(x) + inverse_word(y)


def w(*letters) -> tuple:
    """Shorthand: ``w("a", "b", "A^-1")`` with a ``^-1`` suffix for inverses."""
    out = []
    for x in letters:
        if x.endswith("^-1"):
            out.append((x[:-3], -1))
        else:
            out.append((x, 1))
    return tuple(out)


# --- presentations --------------------------------------------------------------

@dataclass(frozen=True)
class Evaluation:
    """Letters sent to elements of a group oracle."""

    oracle: GroupOracle
    images: dict
    source: dict | None = None     # letter -> oracle word, kept for JSON output

    def element(self, word):
        o = self.oracle
        g = o.identity
        for a, e in word:
            x = self.images[a]
            g = o.multiply(g, x if e > 0 else o.inverse(x))
        return g


class Presentation:
    def __init__(self, letters, relators, evaluation: Evaluation | None = None,
                 convention: str = CONVENTION, label: str = ""):
        self.letters = list(letters)
        if len(set(self.letters)) != len(self.letters):
            raise BadParams("letters must be distinct")
        known = set(self.letters)
        rels = []
        for r in relators:
            r = reduce_word(r)
            for a, _ in r:
                if a not in known:
                    raise BadParams(f"relator uses unknown letter {a!r}")
            if r:
                rels.append(r)
        self.relators = rels
        self.evaluation = evaluation
        self.convention = convention
        self.label = label

    def __repr__(self):
        return (f"Presentation({self.label or ''} letters={len(self.letters)}, "
                f"relators={len(self.relators)}, max_len={self.max_relator_length})")

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)

    def evaluate(self, word):
        if self.evaluation is None:
            raise NoEvaluation("presentation has no evaluation")
        return self.evaluation.element(word)

    def to_json(self) -> dict:
        out = {"label": self.label, "letters": list(self.letters),
               "relators": [to_runs(r) for r in self.relators],
               "max_relator_length": self.max_relator_length,
               "convention": self.convention}
        ev = self.evaluation
        if ev is not None and ev.source is not None:
            out["evaluation"] = {"oracle": ev.oracle.spec(), "map": dict(ev.source)}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Presentation":
        try:
            letters = data["letters"]
            rels = [expand_runs(r) for r in data["relators"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed presentation: {exc}") from exc
        ev = None
        if data.get("evaluation"):
            e = data["evaluation"]
            oracle = oracle_from_spec(e["oracle"])
            source = dict(e["map"])
            images = {a: oracle.word(oracle.parse_word(source[a])) for a in letters}
            ev = Evaluation(oracle, images, source)
        return cls(letters, rels, ev, data.get("convention", CONVENTION), data.get("label", ""))

    @classmethod
    def load(cls, path) -> "Presentation":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def evaluation_from_labels(oracle: GroupOracle, mapping: dict) -> Evaluation:
    """Evaluation where each letter is sent to a word in the oracle's generator labels."""
    images = {a: oracle.word(oracle.parse_word(word)) for a, word in mapping.items()}
    return Evaluation(oracle, images, dict(mapping))


def relators_hold(p: Presentation):
    """(True, None) if every relator evaluates to the identity, else (False, first failing relator)."""
    if p.evaluation is None:
        raise NoEvaluation("presentation has no evaluation")
    o = p.evaluation.oracle
    ident = o.key(o.identity)
    for r in p.relators:
        if o.key(p.evaluate(r)) != ident:
            return False, r
    return True, None


# --- fixtures -------------------------------------------------------------------------

def steinberg_presentation(n: int) -> Presentation:
    """Steinberg presentation of SL_n(Z), n >= 3, evaluated in the elementary matrices."""
    if n < 3:
        raise BadN("the Steinberg presentation needs n >= 3")
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    name = {ij: f"e{ij[0]}{ij[1]}" for ij in idx}
    e = {ij: ((name[ij], 1),) for ij in idx}
    rels = []
    for (i, j) in idx:
        for k in range(1, n + 1):
            if k not in (i, j):
                rels.append(commutator_word(e[i, j], e[j, k]) + inverse_word(e[i, k]))
    for a, (i, j) in enumerate(idx):
        for (k, l) in idx[a + 1:]:
            if i not in (j, l) and k not in (j, l):
                rels.append(commutator_word(e[i, j], e[k, l]))
    rels.append(power_word(e[1, 2] + inverse_word(e[2, 1]) + e[1, 2], 4))
    oracle = sl_n_z(n)
    ev = evaluation_from_labels(oracle, {name[ij]: name[ij] for ij in idx})
    return Presentation([name[ij] for ij in idx], rels, ev, label=f"steinberg:{n}")


def dihedral_presentation(n: int = 4) -> Presentation:
    """<r, s | r^n, s^2, (s r)^2>, evaluated in the dihedral group of order 2n."""
    r, s = (("r", 1),), (("s", 1),)
    rels = [power_word(r, n), power_word(s, 2), power_word(s + r, 2)]
    ev = evaluation_from_labels(dihedral(n), {"r": "r", "s": "s"})
    return Presentation(["r", "s"], rels, ev, label=f"dihedral:{n}")


# --- the defining-subset transform ---------------------------------------------------

def defining_subset_m(n: int) -> int:
    """Ball radius for relators of length at most n: floor((n + 2) / 3)."""
    return (n + 2) // 3


@dataclass
class DefiningSubset:
    presentation: Presentation
    m: int
    elements: list           # oracle element of each new letter, in letter order
    words: list              # a geodesic word in the old letters for each new letter


def defining_subset_presentation(p: Presentation, node_budget: int | None = None) -> DefiningSubset:
    """Rewrite ``p`` over the ball of radius m = floor((n+2)/3) in the old letters.

    New letters ``w0, w1, ...`` name the ball's elements (``w0`` is the
    identity).  Relators are ``w s (ws)^-1`` for w of length <= m-1 and s of
    length <= 1, the pairs ``s (s^-1)`` and ``w0``, and every old relator cut
    into three pieces of length <= m.
    """
    if p.evaluation is None:
        raise NoEvaluation("the transform needs an evaluation")
    ev = p.evaluation
    oracle = ev.oracle
    gens = []
    for a in p.letters:
        gens.append((a, ev.images[a]))
        gens.append((a + "^-1", oracle.inverse(ev.images[a])))
    big = GroupOracle(oracle.family, oracle.params, oracle.identity, oracle.multiply,
                      oracle.inverse, oracle.encode, gens, oracle.decode)
    m = max(1, defining_subset_m(p.max_relator_length))
    ball = word_ball(big, m, node_budget)
    elems = ball.elements(m)
    letter = {g: f"w{k}" for k, g in enumerate(elems)}
    words = [w(*ball.word_for(g)) for g in elems]
    one = letter[oracle.identity]
    rels = [((one, 1),)]
    short = ball.elements(1)
    for s in short:
        rels.append(((letter[s], 1), (letter[oracle.inverse(s)], 1)))
    for g in ball.elements(m - 1):
        for s in short:
            h = oracle.multiply(g, s)
            rels.append(((letter[g], 1), (letter[s], 1), (letter[h], -1)))
    for r in p.relators:
        pieces = [r[k * m:(k + 1) * m] for k in range(3)]
        if sum(map(len, pieces)) != len(r):
            raise BadParams("relator longer than 3m")
        rels.append(tuple((letter[ev.element(x)], 1) for x in pieces if x))
    source = None
    if ev.source is not None:
        source = {letter[g]: " ".join(_oracle_labels(ev, wd)) for g, wd in zip(elems, words)}
    new_ev = Evaluation(oracle, {letter[g]: g for g in elems}, source)
    pres = Presentation([letter[g] for g in elems], rels, new_ev,
                        label=f"defining-subset(m={m}) of {p.label}".strip())
    return DefiningSubset(pres, m, elems, words)


def _oracle_labels(ev: Evaluation, word) -> list:
    """Spell a word in presentation letters with the oracle's generator labels."""
    o = ev.oracle
    out = []
    for a, e in word:
        labels = o.parse_word(ev.source[a])
        if e < 0:
            labels = [o.inverse_label(x) for x in reversed(labels)]
        out.extend(labels)
    return out


def todd_coxeter(p: Presentation, max_cosets: int | None = None) -> int:
    """Order of the group presented by ``p`` (coset enumeration over the trivial subgroup).

    HLT strategy with coincidence processing; raises BudgetExceeded if more
    than ``max_cosets`` cosets are defined.
    """
    limit = default_budget() if max_cosets is None else max_cosets
    col = {a: 2 * i for i, a in enumerate(p.letters)}
    ncol = 2 * len(p.letters)
    rels = [[col[a] if e > 0 else col[a] ^ 1 for a, e in r] for r in p.relators]
    table = [[None] * ncol]
    parent = [0]

    def rep(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(c, x):
        if len(table) >= limit:
            raise BudgetExceeded(len(table))
        d = len(table)
        table.append([None] * ncol)
        parent.append(d)
        table[c][x] = d
        table[d][x ^ 1] = c

    def merge(k, l, queue):
        k, l = rep(k), rep(l)
        if k == l:
            return
        k, l = min(k, l), max(k, l)
        parent[l] = k
        queue.append(l)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(ncol):
                f = table[e][x]
                if f is None:
                    continue
                table[f][x ^ 1] = None
                e1, f1 = rep(e), rep(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] is not None:
                    merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan_and_fill(c, word):
        f, b = c, c
        i, j = 0, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] is not None:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][word[j] ^ 1] is not None:
                b = table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][word[i]] = b
                table[b][word[i] ^ 1] = f
                return
            define(f, word[i])

    c = 0
    while c < len(table):
        for r in rels:
            if parent[c] != c:
                break
            scan_and_fill(c, r)
        if parent[c] == c:
            for x in range(ncol):
                if table[c][x] is None:
                    define(c, x)
        c += 1
    return sum(1 for k in range(len(table)) if parent[k] == k)


# --- HNN extensions and amalgams ---------------------------------------------------

def _as_word(x) -> tuple:
    if isinstance(x, str):
        return ((x, 1),)
    return tuple(x)


def hnn_presentation(base: Presentation, K, phi, stable: str = "t",
                     stable_image=None) -> Presentation:
    """<base letters, t | base relators, t k t^-1 phi(k)^-1 for k in K>.

    ``K`` is a list of words (or letters) and ``phi`` a dict or list giving
    their images.  ``stable_image`` optionally evaluates t in the base oracle.
    """
    if stable in base.letters:
        raise LetterClash(f"stable letter {stable!r} already used")
    K = [_as_word(k) for k in K]
    images = [_as_word(phi[i] if not isinstance(phi, dict) else phi[_key(k)]) for i, k in enumerate(K)]
    t = ((stable, 1),)
    rels = list(base.relators)
    for k, fk in zip(K, images):
        rels.append(t + k + inverse_word(t) + inverse_word(fk))
    ev = None
    if base.evaluation is not None and stable_image is not None:
        old = base.evaluation
        imgs = dict(old.images)
        imgs[stable] = stable_image
        ev = Evaluation(old.oracle, imgs, None)
    return Presentation(base.letters + [stable], rels, ev, label=f"HNN({base.label})")


def _key(k):
    return k[0][0] if len(k) == 1 and k[0][1] == 1 else k


def amalgam_presentation(pA: Presentation, pB: Presentation, C, phi) -> Presentation:
    """<A, B | relators of A and B, c phi(c)^-1 for c in C>."""
    clash = set(pA.letters) & set(pB.letters)
    if clash:
        raise LetterClash(f"letters used on both sides: {sorted(clash)}")
    C = [_as_word(c) for c in C]
    images = [_as_word(phi[i] if not isinstance(phi, dict) else phi[_key(c)]) for i, c in enumerate(C)]
    rels = list(pA.relators) + list(pB.relators)
    for c, fc in zip(C, images):
        rels.append(c + inverse_word(fc))
    return Presentation(pA.letters + pB.letters, rels, label=f"amalgam({pA.label},{pB.label})")


# --- valuations and classifiers ----------------------------------------------------

class GammaClass(str, enum.Enum):
    NOT_FINITELY_GENERATED = "not_finitely_generated"
    FG_NOT_FP = "fg_not_fp"
    FINITELY_PRESENTED = "finitely_presented"


class SemidirectClass(str, enum.Enum):
    NOT_COMPACTLY_GENERATED = "not_compactly_generated"
    CG_NOT_CP = "cg_not_cp"
    COMPACTLY_PRESENTED = "compactly_presented"


DICTIONARY = {
    GammaClass.NOT_FINITELY_GENERATED: SemidirectClass.NOT_COMPACTLY_GENERATED,
    GammaClass.FG_NOT_FP: SemidirectClass.CG_NOT_CP,
    GammaClass.FINITELY_PRESENTED: SemidirectClass.COMPACTLY_PRESENTED,
}


def factorint(n: int) -> dict:
    # sympy takes a third of a second to import, so only pay for it when factoring
    from sympy import factorint as _factorint
    return _factorint(n)


def _is_prime(p: int) -> bool:
    return p >= 2 and factorint(p) == {p: 1}


@dataclass(frozen=True)
class ValuationVector:
    lam: Fraction
    primes: tuple
    valuations: tuple
    residual: bool          # lam has a prime factor outside ``primes``

    @classmethod
    def of(cls, lam, primes) -> "ValuationVector":
        lam = Fraction(lam)
        if lam == 0:
            raise BadParams("lambda must be nonzero")
        primes = tuple(int(p) for p in primes)
        if len(set(primes)) != len(primes) or not all(_is_prime(p) for p in primes):
            raise BadParams(f"not a set of distinct primes: {primes}")
        fac = dict(factorint(abs(lam.numerator)))
        for q, e in factorint(lam.denominator).items():
            fac[q] = fac.get(q, 0) - e
        vals = tuple(fac.get(p, 0) for p in primes)
        residual = any(q not in primes for q in fac)
        return cls(lam, primes, vals, residual)

    def absolute_value(self, p: int) -> Fraction:
        return Fraction(p) ** (-self.valuations[self.primes.index(p)])

    def inverse(self) -> "ValuationVector":
        return ValuationVector(1 / self.lam, self.primes, tuple(-v for v in self.valuations),
                               self.residual)

    def to_json(self) -> dict:
        return {"lambda": str(self.lam), "primes": list(self.primes),
                "valuations": list(self.valuations), "residual_prime": self.residual}


def _require_unit(v: ValuationVector):
    if v.residual:
        raise NotAUnit(f"{v.lam} is not a unit of Z[1/{'*'.join(map(str, v.primes)) or '1'}]")


def engulfs(v: ValuationVector) -> bool:
    """Multiplication by lambda maps Z into itself and its inverse powers exhaust Z[1/P]."""
    _require_unit(v)
    return v.lam.denominator == 1 and all(x >= 1 for x in v.valuations)


def classify_gamma_lambda(v: ValuationVector) -> GammaClass:
    _require_unit(v)
    if not v.primes:
        raise BadParams("the prime set must be nonempty")
    if any(x == 0 for x in v.valuations):
        return GammaClass.NOT_FINITELY_GENERATED
    if all(x > 0 for x in v.valuations) or all(x < 0 for x in v.valuations):
        return GammaClass.FINITELY_PRESENTED
    return GammaClass.FG_NOT_FP


@dataclass(frozen=True)
class HomVector:
    """Per-factor direction vectors u_i over Z^d with positive scale tags q_i."""

    directions: tuple
    scales: tuple = ()

    def __post_init__(self):
        dirs = tuple(tuple(Fraction(x) for x in u) for u in self.directions)
        object.__setattr__(self, "directions", dirs)
        if not self.scales:
            object.__setattr__(self, "scales", tuple(1 for _ in dirs))
        if len(self.scales) != len(dirs) or any(q <= 0 for q in self.scales):
            raise BadParams("need one positive scale per factor")
        dims = {len(u) for u in dirs}
        if len(dims) > 1:
            raise DimensionMismatch(f"direction vectors have dimensions {sorted(dims)}")

    @classmethod
    def from_valuations(cls, v: ValuationVector) -> "HomVector":
        """w_i = -v_{p_i}(lambda) on A = Z, scale p_i."""
        return cls(tuple((-x,) for x in v.valuations), v.primes)

    def to_json(self) -> dict:
        return {"directions": [[str(x) for x in u] for u in self.directions],
                "scales": [str(q) for q in self.scales]}


def zero_in_segment(u1, u2) -> bool:
    """Whether 0 lies on the segment [u1, u2]: an endpoint is 0, or u2 = -t u1 with t > 0."""
    u1 = tuple(Fraction(x) for x in u1)
    u2 = tuple(Fraction(x) for x in u2)
    if len(u1) != len(u2):
        raise DimensionMismatch(f"dimensions {len(u1)} and {len(u2)}")
    if not any(u1) or not any(u2):
        return True
    i = next(k for k, x in enumerate(u1) if x)
    t = -u2[i] / u1[i]
    return t > 0 and all(b == -t * a for a, b in zip(u1, u2))


def classify_semidirect(h: HomVector) -> SemidirectClass:
    dirs = h.directions
    if not dirs:
        raise BadParams("need at least one factor")
    if any(not any(u) for u in dirs):
        return SemidirectClass.NOT_COMPACTLY_GENERATED
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            if zero_in_segment(dirs[i], dirs[j]):
                return SemidirectClass.CG_NOT_CP
    return SemidirectClass.COMPACTLY_PRESENTED
