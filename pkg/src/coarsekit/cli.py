"""``coarse-kit`` command line.

Every subcommand prints one report on stdout: a JSON object holding the run
configuration and the result, or CSV for growth series.  Exit status is 0 for
a completed run (negative verdicts included), 2 for usage or input errors and
3 when a budget runs out before a verdict.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import growth as gr
from . import rips as rp
from . import splitting as sp
from .errors import BudgetExceeded, CoarseKitError
from .groups import (BallTable, DEFAULT_BUDGET, distortion_profile, oracle_from_spec,
                     word_ball)
from .metric import (TOL, FiniteMetricSpace, MapSample, c_components, empirical_controls,
                     format_number, parse_number, ultrametrize)


class UsageError(Exception):
    pass


def report_schema() -> dict:
    """The JSON schema every report conforms to."""
    from importlib import resources
    return json.loads(resources.files("coarsekit").joinpath("report.schema.json").read_text())


# --- helpers --------------------------------------------------------------------

def _number(text):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _positive(text):
    x = _number(text)
    if x <= 0:
        raise UsageError(f"expected a positive number, got {text!r}")
    return x


def _params(text):
    out = {}
    for item in filter(None, (text or "").split(",")):
        k, _, v = item.partition("=")
        out[k.strip()] = v.strip()
    return out


def _space(args) -> FiniteMetricSpace:
    if getattr(args, "space", None):
        with open(args.space) as fh:
            data = json.load(fh)
        # a report written by ``coarse-kit fixture`` carries the space in "result"
        return FiniteMetricSpace.from_json(data.get("result", data))
    if getattr(args, "fixture", None):
        return rp.fixture(args.fixture, _params(args.params))
    if getattr(args, "family", None):
        from .groups import ball_metric_space
        return ball_metric_space(oracle_from_spec(args.family), args.ball_radius, args.budget)
    raise UsageError("give --space PATH, --fixture NAME or --family SPEC")


def _point(space: FiniteMetricSpace, text):
    if text is None:
        return space.points[0]
    by_name = {_name(p): p for p in space.points}
    if text in by_name:
        return by_name[text]
    raise UsageError(f"unknown point {text!r}")


def _name(p) -> str:
    return p if isinstance(p, str) else json.dumps(p, separators=(",", ":"))


def _points(space, text):
    return [_point(space, t) for t in _split_ids(text)]


def _split_ids(text):
    """Split a comma list, keeping bracketed JSON ids like ``[0,1]`` together."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch in "[{"
        depth -= ch in "]}"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _oracle(args):
    return oracle_from_spec(args.family)


def _ball(args, radius):
    oracle = _oracle(args)
    if args.cache and os.path.exists(args.cache):
        table = BallTable.load(args.cache, oracle)
        table.grow(radius, args.budget)
    else:
        table = word_ball(oracle, radius, args.budget)
    if args.cache:
        table.save(args.cache)
    return table


def _series(spec, radius, budget):
    """A growth series from a family spec, a closed form (poly:d, exp:b) or a file."""
    name, _, rest = spec.partition(":")
    if name == "poly":
        d = int(rest)
        return gr.GrowthSeries.from_function(lambda r: max(r, 1) ** d if d else 1,
                                             range(radius + 1), spec)
    if name == "exp":
        b = int(rest)
        return gr.GrowthSeries.from_function(lambda r: b ** r, range(radius + 1), spec)
    if os.path.exists(spec):
        with open(spec) as fh:
            text = fh.read()
        if spec.endswith(".json"):
            data = json.loads(text)
            data = data.get("result", data)
            samples = tuple((parse_number(r), c) for r, c in data["samples"])
        else:
            rows = [l.split(",") for l in text.splitlines() if l and not l.startswith(("#", "r,"))]
            samples = tuple((parse_number(r), int(c)) for r, c in rows)
        return gr.GrowthSeries(samples, spec)
    return gr.growth_series(oracle_from_spec(spec), r_max=radius, node_budget=budget)


def _epsilon(text):
    return Fraction(text)


# --- subcommands ------------------------------------------------------------------

def cmd_ball(args):
    table = _ball(args, args.radius)
    return {"family": table.oracle.spec(), "radius": args.radius,
            "generators": [lab for lab, _ in table.oracle.generators],
            "ball_sizes": table.ball_sizes()[:args.radius + 1],
            "sphere_sizes": table.sphere_sizes()[:args.radius + 1]}


def cmd_growth(args):
    if args.family:
        table = _ball(args, args.radius)
        return gr.growth_series(table, r_max=args.radius, node_budget=args.budget)
    space = _space(args)
    return gr.growth_series(space, _point(space, args.base), args.radius)


def cmd_compare_growth(args):
    left = _series(args.left, args.radius, args.budget)
    right = _series(args.right, args.radius, args.budget)
    kw = {}
    if args.lambdas:
        kw["lambdas"] = [_number(x) for x in args.lambdas.split(",")]
    if args.mus:
        kw["mus"] = [_number(x) for x in args.mus.split(",")]
    if args.cs:
        kw["cs"] = [_number(x) for x in args.cs.split(",")]
    w = gr.compare_growth(left, right, **kw)
    out = {"left": left.to_json(), "right": right.to_json()}
    if isinstance(w, gr.GrowthWitness):
        out.update({"verdict": "preceq_witness", "witness": w.to_json()})
    else:
        out.update(w.to_json())
    return out


def cmd_poldeg(args):
    series = _series(args.family, args.radius, args.budget)
    est = gr.poldeg_estimate(series, args.tail)
    return {"series": series.to_json(), **est.to_json()}


def cmd_distortion(args):
    oracle = _oracle(args)
    z = oracle.word(oracle.parse_word(args.element))
    prof = distortion_profile(oracle, z, args.n_max, args.max_radius, args.budget)
    return {"family": oracle.spec(), "element": args.element,
            "profile": [[n, length] for n, length in prof]}


def cmd_lattice(args):
    space = _space(args)
    L = gr.greedy_lattice(space, args.c, _point(space, args.seed_point))
    sep, cover = gr.lattice_check(space, L, args.c)
    return {"lattice": list(L), "size": len(L), "separated": sep,
            "cover_radius": format_number(cover),
            "cobounded_2c": bool(cover <= 2 * args.c + (TOL if isinstance(cover, float) else 0))}


def cmd_folner(args):
    if args.family:
        source = _ball(args, 0) if args.cache else _oracle(args)
    else:
        source = _space(args)
    res = gr.folner_search(source, args.r, args.epsilon, args.strategy, args.budget,
                           args.max_size)
    return res.to_json()


def cmd_tree_check(args):
    tree = gr.regular_tree(args.degree, args.depth)
    if args.subset:
        U = [int(x) for x in args.subset.split(",")]
        b, ok = gr.tree_boundary_check(tree, U, args.degree)
        return {"subset": U, "boundary": b, "holds": ok}
    checked = 0
    failures = []
    for U in gr.enumerate_connected(0, tree.neighbors, args.max_size, args.budget):
        b, ok = gr.tree_boundary_check(tree, U, args.degree)
        checked += 1
        if not ok:
            failures.append(list(U))
    return {"degree": args.degree, "depth": args.depth, "max_size": args.max_size,
            "subsets_checked": checked, "failures": failures[:10], "holds": not failures}


def cmd_ultrametrize(args):
    return ultrametrize(_space(args)).to_json()


def cmd_components(args):
    space = _space(args)
    return {"c": format_number(args.c), "components": c_components(space, args.c)}


def cmd_controls(args):
    with open(args.map) as fh:
        data = json.load(fh)
    dom = FiniteMetricSpace.from_json(data["domain"])
    cod = FiniteMetricSpace.from_json(data["codomain"]) if "codomain" in data else dom
    names = {_name(p): p for p in dom.points}
    cnames = {_name(p): p for p in cod.points}
    image = {}
    for k, v in data["image"].items():
        if k not in names or _name(v) not in cnames:
            raise UsageError(f"bad image entry {k!r} -> {v!r}")
        image[names[k]] = cnames[_name(v)]
    lower, upper = empirical_controls(MapSample(dom, cod, image))
    return {"lower": lower.to_json(), "upper": upper.to_json()}


def _complex(args):
    return rp.build_rips(_space(args), args.c)


def cmd_rips(args):
    cx = _complex(args)
    out = cx.to_json()
    data = cx.pi1()
    out.update({"counts": {"vertices": len(cx.vertices), "edges": len(cx.edge_index),
                           "triangles": len(cx.triangle_index)},
                "components": len(cx.components()), "betti1": data.betti1})
    if args.torsion:
        out["torsion"] = data.invariant_factors()
    return out


def cmd_h1(args):
    cx = _complex(args)
    loop = _points(cx.space, args.loop)
    cls = rp.h1_class(cx, loop)
    return {"loop": loop, "zero": cls.is_zero,
            "class": {str(k): v for k, v in sorted(cls.reduced.items())}}


def cmd_contract(args):
    cx = _complex(args)
    loop = _points(cx.space, args.loop)
    return {"loop": loop, **rp.contract_loop(cx, loop, args.budget).to_json()}


def cmd_sc_probe(args):
    space = _space(args)
    rep = rp.sc_probe(space, _point(space, args.x0), args.c1, args.c2, args.samples,
                      args.budget, args.seed)
    return rep.to_json()


def cmd_rotation(args):
    try:
        R, m = args.circle.split(":")
        R, m = _positive(R), int(m)
    except ValueError as exc:
        raise UsageError("--circle takes R:m") from exc
    if args.loop == "polygon":
        idx = list(range(m)) + [0]
    elif args.loop == "reversed":
        idx = [0] + list(range(m - 1, -1, -1))
    elif args.loop == "constant":
        idx = [0, 0, 0]
    else:
        idx = [int(x) for x in args.loop.split(",")]
    cert = rp.rotation_number(idx, R, m)
    return {"loop": idx, "m": m, **cert.to_json()}


def cmd_fixture(args):
    return rp.fixture(args.name, _params(args.params)).to_json()


def _presentation(args) -> sp.Presentation:
    if args.presentation:
        return sp.Presentation.load(args.presentation)
    name, _, n = (args.builtin or "").partition(":")
    if name == "steinberg":
        return sp.steinberg_presentation(int(n or 3))
    if name == "dihedral":
        return sp.dihedral_presentation(int(n or 4))
    raise UsageError("give --presentation PATH or --builtin steinberg:N|dihedral:N")


def cmd_defining_subset(args):
    p = _presentation(args)
    ds = sp.defining_subset_presentation(p, args.budget)
    q = ds.presentation
    ok, bad = sp.relators_hold(q)
    out = {"input": {"label": p.label, "max_relator_length": p.max_relator_length},
           "m": ds.m, "alphabet_size": len(q.letters), "relator_count": len(q.relators),
           "max_relator_length": q.max_relator_length, "relators_hold": ok}
    if bad is not None:
        out["failing_relator"] = sp.to_runs(bad)
    if args.order_check:
        out["order_original"] = sp.todd_coxeter(p, args.budget)
        out["order_transformed"] = sp.todd_coxeter(q, args.budget)
    if args.full:
        out["presentation"] = q.to_json()
    return out


def cmd_verify_presentation(args):
    p = _presentation(args)
    ok, bad = sp.relators_hold(p)
    out = {"label": p.label, "letters": p.letters, "relator_count": len(p.relators),
           "max_relator_length": p.max_relator_length, "relators_hold": ok,
           "convention": p.convention}
    if bad is not None:
        out["failing_relator"] = sp.to_runs(bad)
    return out


def _valuation(args):
    primes = [int(x) for x in args.primes.split(",")] if args.primes else []
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad lambda {args.lam!r}") from exc
    return sp.ValuationVector.of(lam, primes)


def cmd_engulfs(args):
    v = _valuation(args)
    return {"input": v.to_json(), "engulfs": sp.engulfs(v), "inverse_engulfs": sp.engulfs(v.inverse())}


def cmd_classify_bs(args):
    v = _valuation(args)
    return {"input": v.to_json(), "verdict": sp.classify_gamma_lambda(v).value}


def cmd_classify_semidirect(args):
    if args.lam:
        h = sp.HomVector.from_valuations(_valuation(args))
    else:
        dirs = [tuple(Fraction(x) for x in part.split(",")) for part in args.directions.split(";")]
        scales = tuple(Fraction(x) for x in args.scales.split(",")) if args.scales else ()
        h = sp.HomVector(tuple(dirs), scales)
    return {"input": h.to_json(), "verdict": sp.classify_semidirect(h).value}


# --- parser -------------------------------------------------------------------------

def _budget_default():
    try:
        return int(os.environ.get("COARSEKIT_BUDGET", DEFAULT_BUDGET))
    except ValueError:
        return DEFAULT_BUDGET


def _space_args(p, c=False):
    p.add_argument("--space", help="space file (JSON)")
    p.add_argument("--fixture", choices=["circle", "highway", "line"])
    p.add_argument("--params", default="", help="fixture parameters, e.g. R=1,m=6")
    p.add_argument("--family", help="group spec; the space is a word-metric ball")
    p.add_argument("--ball-radius", type=int, default=2)
    if c:
        p.add_argument("--c", type=_positive, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=_budget_default(),
                        help="node / move / subset budget")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="accepted; runs are sequential")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--cache", help="ball cache file (JSON lines)")

    parser = argparse.ArgumentParser(prog="coarse-kit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=fn)
        return p

    p = add("ball", cmd_ball)
    p.add_argument("--family", required=True)
    p.add_argument("--radius", type=int, required=True)

    p = add("growth", cmd_growth)
    _space_args(p)
    p.add_argument("--radius", type=_number, required=True)
    p.add_argument("--base")

    p = add("compare-growth", cmd_compare_growth)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--radius", type=int, default=20)
    p.add_argument("--lambdas")
    p.add_argument("--mus")
    p.add_argument("--cs")

    p = add("poldeg", cmd_poldeg)
    p.add_argument("--family", required=True, help="group spec, closed form or series file")
    p.add_argument("--radius", type=int, default=16)
    p.add_argument("--tail", type=float, default=0.5)

    p = add("distortion", cmd_distortion)
    p.add_argument("--family", required=True)
    p.add_argument("--element", required=True, help="word in generator labels")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--max-radius", type=int, default=24)

    p = add("lattice", cmd_lattice)
    _space_args(p, c=True)
    p.add_argument("--seed-point")

    p = add("folner", cmd_folner)
    _space_args(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--epsilon", type=_epsilon, default=Fraction(1, 2))
    p.add_argument("--strategy", choices=["balls", "greedy", "exhaustive"], default="balls")
    p.add_argument("--max-size", type=int, default=12)

    p = add("tree-check", cmd_tree_check)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--max-size", type=int, default=10)
    p.add_argument("--subset", help="comma list of vertex ids; default: exhaustive")

    p = add("ultrametrize", cmd_ultrametrize)
    _space_args(p)

    p = add("components", cmd_components)
    _space_args(p, c=True)

    p = add("controls", cmd_controls)
    p.add_argument("--map", required=True, help="JSON with domain, codomain, image")

    p = add("rips", cmd_rips)
    _space_args(p, c=True)
    p.add_argument("--torsion", action="store_true")

    p = add("h1", cmd_h1)
    _space_args(p, c=True)
    p.add_argument("--loop", required=True)

    p = add("contract", cmd_contract)
    _space_args(p, c=True)
    p.add_argument("--loop", required=True)

    p = add("sc-probe", cmd_sc_probe)
    _space_args(p)
    p.add_argument("--x0")
    p.add_argument("--c1", type=_positive, required=True)
    p.add_argument("--c2", type=_positive, required=True)
    p.add_argument("--samples", type=int, default=32)

    p = add("rotation", cmd_rotation)
    p.add_argument("--circle", required=True, help="R:m")
    p.add_argument("--loop", default="polygon", help="polygon, reversed, constant or indices")

    p = add("fixture", cmd_fixture)
    p.add_argument("--name", required=True, choices=["circle", "highway", "line"])
    p.add_argument("--params", default="")

    for name, fn in (("defining-subset", cmd_defining_subset),
                     ("verify-presentation", cmd_verify_presentation)):
        p = add(name, fn)
        p.add_argument("--presentation")
        p.add_argument("--builtin", help="steinberg:N or dihedral:N")
        if name == "defining-subset":
            p.add_argument("--order-check", action="store_true")
            p.add_argument("--full", action="store_true")

    for name, fn in (("engulfs", cmd_engulfs), ("classify-bs", cmd_classify_bs)):
        p = add(name, fn)
        p.add_argument("--lambda", dest="lam", required=True)
        p.add_argument("--primes", default="")

    p = add("classify-semidirect", cmd_classify_semidirect)
    p.add_argument("--directions", help="factors separated by ';', coordinates by ','")
    p.add_argument("--scales")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--primes", default="")
    return parser


_IGNORED = {"func", "command", "budget", "seed", "format", "jobs"}


def run_config(args) -> dict:
    inputs = {k: (format_number(v) if isinstance(v, (Fraction, float)) else v)
              for k, v in sorted(vars(args).items()) if k not in _IGNORED and v is not None}
    return {"subcommand": args.command, "inputs": inputs, "budget": args.budget,
            "seed": args.seed, "tolerance": TOL, "format": args.format, "jobs": args.jobs}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_number(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def render(args, result) -> str:
    config = run_config(args)
    if args.format == "csv":
        if not isinstance(result, gr.GrowthSeries):
            raise UsageError("csv output is only available for growth series")
        return "# " + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n" + result.to_csv()
    if isinstance(result, gr.GrowthSeries):
        result = result.to_json()
    return json.dumps(_jsonable({"config": config, "result": result}), sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = "csv" if args.command == "growth" else "json"
    if args.budget < 1:
        print("coarse-kit: --budget must be positive", file=sys.stderr)
        return 2
    try:
        result = args.func(args)
        text = render(args, result)
    except BudgetExceeded as exc:
        print(f"coarse-kit: {exc}", file=sys.stderr)
        return 3
    except (UsageError, CoarseKitError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"coarse-kit: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
