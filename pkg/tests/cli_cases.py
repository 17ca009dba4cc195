"""One representative invocation per subcommand; shared by the CLI and determinism tests.

``{tmp}`` is replaced by a per-test directory holding the input files built by
``write_inputs``.
"""
import json

CASES = {
    "ball": ["ball", "--family", "free:2", "--radius", "3"],
    "growth": ["growth", "--family", "free:2", "--radius", "2"],
    "compare-growth": ["compare-growth", "--left", "exp:3", "--right", "exp:2"],
    "poldeg": ["poldeg", "--family", "abelian:2", "--radius", "16"],
    "distortion": ["distortion", "--family", "heisenberg", "--element", "u", "--n-max", "9",
                   "--max-radius", "12"],
    "lattice": ["lattice", "--fixture", "line", "--params", "radius=5", "--c", "3"],
    "folner": ["folner", "--family", "abelian:1", "--strategy", "exhaustive"],
    "tree-check": ["tree-check", "--depth", "6", "--max-size", "6"],
    "ultrametrize": ["ultrametrize", "--space", "{tmp}/space.json"],
    "components": ["components", "--space", "{tmp}/space.json", "--c", "1"],
    "controls": ["controls", "--map", "{tmp}/map.json"],
    "rips": ["rips", "--fixture", "circle", "--params", "R=1,m=6", "--c", "1"],
    "h1": ["h1", "--fixture", "circle", "--params", "R=1,m=6", "--c", "1",
           "--loop", "0,1,2,3,4,5,0"],
    "contract": ["contract", "--family", "abelian:2", "--ball-radius", "2", "--c", "2",
                 "--loop", "[0,0],[1,0],[1,1],[0,1],[0,0]"],
    "sc-probe": ["sc-probe", "--fixture", "line", "--params", "radius=6", "--c1", "1",
                 "--c2", "1", "--samples", "8", "--seed", "3"],
    "rotation": ["rotation", "--circle", "1:12", "--loop", "polygon"],
    "fixture": ["fixture", "--name", "circle", "--params", "R=1,m=6"],
    "defining-subset": ["defining-subset", "--builtin", "dihedral:4", "--order-check"],
    "verify-presentation": ["verify-presentation", "--builtin", "steinberg:3"],
    "engulfs": ["engulfs", "--lambda", "6", "--primes", "2,3"],
    "classify-bs": ["classify-bs", "--lambda", "1/6", "--primes", "2,3"],
    "classify-semidirect": ["classify-semidirect", "--directions", "1;-2"],
}


def write_inputs(tmp):
    space = {"label": "four points", "points": ["a", "b", "c", "d"],
             "metric": {"kind": "line", "coords": [0, 1, 2, 10]}}
    (tmp / "space.json").write_text(json.dumps(space))
    line = {"label": "Z", "points": [0, 1, 2, 3], "metric": {"kind": "line", "coords": [0, 1, 2, 3]}}
    doubled = {"label": "2Z", "points": [0, 2, 4, 6], "metric": {"kind": "line", "coords": [0, 2, 4, 6]}}
    (tmp / "map.json").write_text(json.dumps(
        {"domain": line, "codomain": doubled, "image": {"0": 0, "1": 2, "2": 4, "3": 6}}))


def argv(name, tmp):
    return [a.replace("{tmp}", str(tmp)) for a in CASES[name]]
