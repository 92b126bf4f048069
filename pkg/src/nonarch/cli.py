"""Command-line front end.

``nonarch run SCENE`` executes the tasks of a JSON scene file;
``nonarch selftest`` runs the bundled acceptance suite;
``nonarch schema`` prints the scene JSON Schema.

Exit codes: 0 success, 1 invalid scene, 2 computation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from . import acceptance
from . import energy as en
from . import toricnorm as tn
from ._exact import fmt, parse
from .errors import ComputationError
from .measures import DiscreteMeasure, PLMeasure1D
from .polytope import RationalPolytope
from .serialize import dump

SCHEMA_VERSION = "1"


class SceneError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("nonarch").joinpath(f"schemas/scene-v{SCHEMA_VERSION}.schema.json")
    return json.loads(text.read_text(encoding="utf-8"))


def _vector(x) -> tuple[Fraction, ...]:
    return (parse(x),) if isinstance(x, str) else tuple(parse(v) for v in x)


# ---------------------------------------------------------------------------
# scene building


class Scene:
    def __init__(self, data: dict, base: Path):
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise SceneError(f"schema violation at {where}: {exc.message}") from None
        self.base = base
        self.P = RationalPolytope.from_points(_vector(v) for v in data["polytope"]["vertices"])
        self.norms = {name: self._norm(name, spec) for name, spec in data.get("norms", {}).items()}
        self.measures = {name: self._measure(spec) for name, spec in data.get("measures", {}).items()}
        self.tasks = data.get("tasks", [])
        names = [t["name"] for t in self.tasks]
        if len(set(names)) != len(names):
            raise SceneError("task names must be unique")
        for t in self.tasks:
            self._check_refs(t)

    def _norm(self, name, spec):
        kind = spec["kind"]
        if kind == "pl-min":
            return tn.divisorial_norm(self.P, [(_vector(p["slope"]), parse(p["const"]))
                                               for p in spec["pieces"]])
        if kind == "valuation":
            return tn.from_valuation(self.P, _vector(spec["xi"]))
        if kind == "truncated":
            table: dict = {}
            for e in spec["table"]:
                key = tuple(e["point"])
                row = table.setdefault(e["m"], {})
                if key in row:
                    raise SceneError(f"norm {name}: duplicate table entry {e['m']}, {key}")
                row[key] = parse(e["value"])
            growth = parse(spec["growth"]) if "growth" in spec else None
            return tn.TruncatedToricNorm(self.P, spec["degree"], table, growth=growth)
        if "poly" in spec:
            return tn.sampled_norm(self.P, parse(spec["pitch"]), poly=[parse(c) for c in spec["poly"]])
        return tn.sampled_norm(self.P, parse(spec["pitch"]), values=[parse(v) for v in spec["values"]])

    def _measure(self, spec):
        atoms = [_vector(a) for a in spec["atoms"]]
        masses = [parse(m) for m in spec["masses"]]
        if len(atoms) != len(masses):
            raise SceneError("measure atoms and masses differ in length")
        if len(set(atoms)) != len(atoms):
            raise SceneError("measure atoms must be distinct")
        return DiscreteMeasure(tuple(atoms), tuple(masses))

    def _check_refs(self, task):
        args = task.get("args", {})
        for key in ("norm", "other"):
            if key in args and args[key] not in self.norms:
                raise SceneError(f"task {task['name']}: unknown norm {args[key]!r}")
        if "measure" in args and args["measure"] not in self.measures:
            raise SceneError(f"task {task['name']}: unknown measure {args['measure']!r}")
        for key in _REQUIRED.get(task["op"], ()):
            if key not in args:
                raise SceneError(f"task {task['name']}: op {task['op']} needs argument {key!r}")


_REQUIRED = {
    "legendre": ("norm",), "vol": ("norm",), "lambda-max": ("norm",),
    "distance": ("norm", "other"), "spectral-measure": ("norm",),
    "spectral-measure-truncated": ("norm", "m"), "fs": ("norm", "xi"),
    "monge-ampere": ("norm",), "canonical-approximant": ("norm", "degree"),
    "round-down": ("norm",), "finite-type": ("norm",), "divisorial": ("norm",),
    "quotient-d1": ("norm", "other"), "energy": ("norm",), "energy-dual": ("measure",),
    "minimum-norm": ("norm",), "t-s": ("xi",),
}


def _homogeneous(scene: Scene, name: str) -> tn.ToricHomNorm:
    chi = scene.norms[name]
    if not isinstance(chi, tn.ToricHomNorm):
        raise SceneError(f"norm {name!r} is truncated; this operation needs a homogeneous norm")
    return chi


def _truncated(scene: Scene, name: str) -> tn.TruncatedToricNorm:
    chi = scene.norms[name]
    if not isinstance(chi, tn.TruncatedToricNorm):
        raise SceneError(f"norm {name!r} is not a truncated table")
    return chi


def execute(scene: Scene, task: dict, tol: float):
    """Run one task; returns (JSON-ready result, optional measure for CSV)."""
    op, args = task["op"], task.get("args", {})
    H = lambda key="norm": _homogeneous(scene, args[key])  # noqa: E731
    if op == "legendre":
        return dump(tn.fs_function(H())), None
    if op == "vol":
        return dump(tn.volume(H())), None
    if op == "lambda-max":
        return dump(tn.lambda_max(H())), None
    if op == "distance":
        p = args.get("p", "1")
        p = "inf" if p == "inf" else parse(p)
        return dump(tn.distance(H(), H("other"), p)), None
    if op == "spectral-measure":
        sigma = tn.spectral_measure(H())
        return dump(sigma), sigma
    if op == "spectral-measure-truncated":
        sigma = tn.spectral_measure_truncated(_truncated(scene, args["norm"]), int(args["m"]))
        return dump(sigma), sigma
    if op == "fs":
        return dump(tn.fs_at(H(), _vector(args["xi"]))), None
    if op == "monge-ampere":
        ma = tn.monge_ampere(H())
        return dump(ma), ma
    if op == "canonical-approximant":
        src = scene.norms[args["norm"]]
        return dump(tn.canonical_approximant(src, int(args["degree"]))), None
    if op == "round-down":
        return dump(tn.round_down(_truncated(scene, args["norm"]))), None
    if op == "finite-type":
        return dump(tn.is_finite_type(H())), None
    if op == "divisorial":
        return dump(tn.is_divisorial(H())), None
    if op == "quotient-d1":
        return dump(tn.quotient_d1(H(), H("other"))), None
    if op == "energy":
        return dump(en.energy(H())), None
    if op == "energy-dual":
        value, sol = en.energy_dual(scene.P, scene.measures[args["measure"]], tol=tol)
        return {"value": repr(value), "solver": dump(sol)}, None
    if op == "minimum-norm":
        return dump(en.minimum_norm(H())), None
    if op == "t-s":
        T, S = en.t_and_s_invariants(scene.P, _vector(args["xi"]))
        return {"T": fmt(T), "S": fmt(S)}, None
    raise SceneError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# output


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def measure_csv(measure) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(measure, PLMeasure1D):
        w.writerow(["t", "cdf"])
        for t, F in measure.table(measure.default_grid()):
            w.writerow([fmt(t), fmt(F)])
    else:
        w.writerow(["atom", "mass"])
        for a, m in measure.items():
            w.writerow([" ".join(fmt(x) for x in a) if isinstance(a, tuple) else fmt(a), fmt(m)])
    return buf.getvalue()


def _to_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def cmd_run(ns) -> int:
    path = Path(ns.scene)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        scene = Scene(data, path.parent)
    except OSError as exc:
        print(f"error: cannot read scene: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid scene: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for task in scene.tasks:
        if ns.filter and ns.filter not in (task["name"], task["op"]):
            continue
        try:
            result, measure = execute(scene, task, ns.tol)
        except ComputationError as exc:
            print(f"error: task {task['name']}: {exc}", file=sys.stderr)
            return 2
        except (ValueError, KeyError, TypeError) as exc:
            print(f"error: task {task['name']}: invalid input: {exc}", file=sys.stderr)
            return 1
        record = {"task": task["name"], "op": task["op"], "result": result}
        if "output" in task:
            out = scene.base / task["output"]
            atomic_write(out, _to_text(record))
        else:
            out = scene.base / f"{task['name']}.json"
            sys.stdout.write(_to_text(record))
        if ns.csv and measure is not None:
            atomic_write(out.with_suffix(".csv"), measure_csv(measure))
    return 0


def cmd_selftest(ns) -> int:
    selected = acceptance.select(ns.filter)
    if not selected:
        print(f"no criteria match filter {ns.filter!r}", file=sys.stderr)
        return 2
    outcomes = [acceptance.run_one(c, ns.seed) for c in selected]
    for o in outcomes:
        print(o.line())
    passed = sum(o.passed for o in outcomes)
    print(f"{passed}/{len(outcomes)} criteria passed (seed {ns.seed})")
    return 0 if passed == len(outcomes) else 2


def cmd_schema(ns) -> int:
    sys.stdout.write(_to_text(load_schema()))
    return 0


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonarch", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute the tasks of a scene file")
    r.add_argument("scene")
    r.add_argument("--csv", action="store_true", help="also write CDF / measure tables")
    r.add_argument("--seed", type=_u64, default=0, help="accepted for uniformity; scenes are deterministic")
    r.add_argument("--tol", type=float, default=en.DEFAULT_TOL, help="transport mass tolerance")
    r.add_argument("--filter", default=None, help="run only tasks with this name or op")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("selftest", help="run the bundled acceptance suite")
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--filter", default=None, help="criterion tag (fd, toric, energy, ...) or number")
    s.add_argument("--tol", type=float, default=en.DEFAULT_TOL)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_selftest)

    sc = sub.add_parser("schema", help="print the scene JSON Schema")
    sc.set_defaults(func=cmd_schema)
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
