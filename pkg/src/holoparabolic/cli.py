"""
Command-line front end.

    holoparabolic run <scenario.json | catalog-name> [--out PATH] [--seed N] [--csv DIR]
    holoparabolic catalog [--json]
    holoparabolic explain <analysis>

Scenario files are JSON objects validated against :data:`SCENARIO_SCHEMA`
(also published as ``docs/scenario.schema.json``).  Functions are written
in the expression grammar of :mod:`holoparabolic.funcs`:

* numbers, ``pi``, ``e`` and one free variable (any identifier, e.g. ``r`` or ``t``);
* ``+ - * /`` and powers written ``^`` or ``**``;
* ``exp log sinh cosh tanh sin cos sqrt`` applied with parentheses;
* ``{"expr": "...", "domain": "(0, inf)"}`` to declare a domain, and
  ``{"table": [[x, y], ...]}`` for a natural cubic through samples.

Exit codes: 0 when every analysis ran (scientific violations included),
1 when an analysis failed numerically, 2 for configuration errors.
"""

import argparse
import csv
import dataclasses
import enum
import json
import math
import os
import sys
import time

import jsonschema
import numpy as np

from . import __version__, catalog as _catalog
from .brownian_sim import SimConfig, escape_probability, exact_hitting_probability, recurrence_monte_carlo, simulate_annulus
from .convergence import TailProbe
from .entropy_bound import ConstantDensity, RadialDistribution, check_bound, check_volume_floor, entropy_l1_condition
from .errors import HoloParabolicError, ScenarioError, UnknownAnalysis
from .funcs import ScalarFunction
from .grw import GRWSpacetime, HypersurfacePointData, pipeline_prop44, pipeline_thm43, slice_point
from .model_manifold import ModelManifold, ricci_range
from .parabolicity import (
    capacity_oracle,
    corollary35_report,
    criterion_thm31,
    criterion_thm32,
    criterion_thm33,
    saturating_entropy,
)

ANALYSES = ("geometry", "entropy", "thm31", "thm32", "thm33", "cor35", "thm43", "prop44",
            "simulate", "recurrence-trend")

_FUNCTION = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {"type": "number"},
        {"type": "object", "required": ["expr"], "additionalProperties": False,
         "properties": {"expr": {"type": "string"}, "domain": {"type": "string"}}},
        {"type": "object", "required": ["table"], "additionalProperties": False,
         "properties": {"table": {"type": "array", "minItems": 3,
                                  "items": {"type": "array", "items": {"type": "number"},
                                            "minItems": 2, "maxItems": 2}}}},
    ]
}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "holoparabolic scenario",
    "type": "object",
    "required": ["name", "analyses"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "analyses": {"type": "array", "minItems": 1, "uniqueItems": True,
                     "items": {"enum": list(ANALYSES)}},
        "manifold": {"type": "object", "required": ["n", "sigma"], "additionalProperties": False,
                     "properties": {"n": {"type": "integer", "minimum": 2}, "sigma": _FUNCTION,
                                    "r_max": _POSITIVE, "name": {"type": "string"}}},
        "spacetime": {"type": "object", "required": ["f", "n"], "additionalProperties": False,
                      "properties": {"f": _FUNCTION, "n": {"type": "integer", "minimum": 2},
                                     "fiber_sec_floor": {"type": "number"},
                                     "interval": {"type": "string"}}},
        "samples": {"type": "array",
                    "items": {"type": "object", "required": ["tau", "H"], "additionalProperties": False,
                              "properties": {"tau": {"type": "number"}, "H": {"type": "number"},
                                             "grad_tau_sq": {"type": "number", "minimum": 0},
                                             "umbilic_lambda": {"type": ["number", "null"]}}}},
        "slices": {"type": "array", "items": {"type": "number"}},
        "complete": {"type": "boolean"},
        "entropy": {"type": "object", "additionalProperties": False, "minProperties": 1,
                    "properties": {"density": _POSITIVE,
                                   "distribution": {"anyOf": [{"const": "saturating"}, _FUNCTION]}}},
        "bound_range": {"type": "array", "items": _POSITIVE, "minItems": 2, "maxItems": 2},
        "radii": {"type": "array", "items": _POSITIVE, "minItems": 1},
        "probe": {"type": "object", "additionalProperties": False,
                  "properties": {"R_start": _POSITIVE, "window_doublings": {"type": "integer", "minimum": 4},
                                 "quad_tol": _POSITIVE}},
        "thm32": {"type": "object", "required": ["C1", "C2"], "additionalProperties": False,
                  "properties": {"C1": _POSITIVE, "C2": _POSITIVE,
                                 "samples": {"type": "integer", "minimum": 100}}},
        "simulation": {"type": "object", "required": ["r0", "inner", "outer"], "additionalProperties": False,
                       "properties": {"r0": _POSITIVE, "inner": _POSITIVE, "outer": _POSITIVE, "dt": _POSITIVE,
                                      "paths": {"type": "integer", "minimum": 1},
                                      "max_steps": {"type": "integer", "minimum": 1},
                                      "scale_steps": {"type": "boolean"},
                                      "workers": {"type": "integer", "minimum": 1}}},
        "recurrence": {"type": "object", "required": ["b_sequence"], "additionalProperties": False,
                       "properties": {"b_sequence": {"type": "array", "items": _POSITIVE, "minItems": 1}}},
    },
}

# inputs each analysis needs; "density"/"distribution" live under "entropy"
_REQUIRES = {
    "geometry": ["manifold"],
    "entropy": ["manifold", "entropy"],
    "thm31": ["manifold", "density"],
    "thm32": ["manifold", "distribution", "thm32"],
    "thm33": ["manifold", "distribution"],
    "cor35": ["manifold", "density"],
    "thm43": ["spacetime", "points", "manifold", "density"],
    "prop44": ["spacetime", "points", "density"],
    "simulate": ["manifold", "simulation"],
    "recurrence-trend": ["manifold", "simulation", "recurrence"],
}

EXPLAIN = {
    "geometry": (
        "Sphere areas, ball volumes (coarea quadrature) and the radial/tangential Ricci\n"
        "eigenvalues at the requested radii, plus the capacity test: the model is\n"
        "non-parabolic exactly when int^inf sigma^(1-n) converges."),
    "entropy": (
        "Compares S(B_R) with Area/4 on >= 64 log-spaced radii and refines the first\n"
        "radius where the bound fails.  For a density floor sigma0 it also checks the\n"
        "volume floor Vol >= exp(4 sigma0 R) literally and in its differential form\n"
        "4 sigma0 <= Area/Vol, and classifies int dR / S."),
    "thm31": (
        "Hypotheses: Ricci >= 0; the bound holds with entropy density >= sigma0 (the\n"
        "sigma0 floor); int R dR / Vol(B_R) converges.  Conclusion: Transient Brownian\n"
        "motion (transience).  If the bound fails the result is ViolationDetected with the\n"
        "radius; a divergent volume integral with Ricci >= 0 forces a violation further out."),
    "thm32": (
        "Hypotheses: the bound for a radial entropy distribution S with 1/S integrable at\n"
        "infinity; Ric >= -C1/r^2; Vol(B_R(q)) <= C2 Vol(B_{R/2}(p)) for p on the sphere of\n"
        "radius R.  Derived: 1/Area and R/Vol integrable.  Conclusion: NonParabolic."),
    "thm33": (
        "Model manifolds only.  Hypotheses: the bound for S with 1/S integrable.  Then\n"
        "1/Area(dB_R) is integrable at infinity and the conclusion is Transient; a\n"
        "divergent integral leaves the criterion silent (NotApplicable)."),
    "cor35": (
        "For a parabolic model with Ricci >= 0 no density floor sigma0 can satisfy the\n"
        "bound.  Searches outward for the first radius with sigma0 Vol > Area/4 and\n"
        "reports ViolationDetected there; NotApplicable when the capacity test says\n"
        "the model is non-parabolic."),
    "thm43": (
        "Hypersurface of dimension >= 3 in a GRW spacetime: (log f)'' <= 0, fiber sectional\n"
        "curvature >= 0 and H^2 <= 4(n-1)/n^2 (f'/f)^2 at every sample give Ricci >= 0;\n"
        "with completeness (user assertion) the density-floor criterion thm31 then gives\n"
        "Transient.  Surfaces are handled by prop44."),
    "prop44": (
        "Surface in a 3-dimensional GRW spacetime: H^2 <= (f'/f)^2, (log f)'' <= 0 and a\n"
        "nonnegative fiber floor make the surface a complete surface of nonnegative\n"
        "Gaussian curvature, hence parabolic, so the bound with any density floor fails\n"
        "(ViolationDetected).  With an induced model the violating radius is reported."),
    "simulate": (
        "Euler-Maruyama simulation of the radial SDE dr = dW + (n-1)/2 sigma'/sigma dt in\n"
        "an annulus (a, b); reports P(hit b before a) with its standard error next to the\n"
        "exact scale-function value."),
    "recurrence-trend": (
        "P(hit b before a) for a growing sequence of b.  Tending to 0 means recurrent\n"
        "(parabolic), a positive limit means transient; compared with the capacity test."),
}


def explain(name):
    if name not in EXPLAIN:
        raise UnknownAnalysis(f"unknown analysis {name!r}; known: {', '.join(ANALYSES)}")
    return f"{name}\n{EXPLAIN[name]}\n"


# -- serialization ----------------------------------------------------------

def _plain(obj):
    """Convert reports, numpy values and enums into JSON-ready Python objects."""
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _plain({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def format_float(x):
    """17 significant digits; non-finite values become the strings inf, -inf, nan."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent=0, step=2):
    obj = _plain(obj)
    pad, inner = " " * indent, " " * (indent + step)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent + step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + step) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def _csv_write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


# -- scenario loading ---------------------------------------------------------

def load_scenario(source):
    """Read a scenario from a catalog name, a JSON file path or an already parsed dict."""
    if isinstance(source, dict):
        return source
    if source in _catalog.names():
        return _catalog.get(source)
    try:
        with open(source) as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {source!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(path):
    return "/".join(str(p) for p in path) or "<root>"


class Scenario:
    """A validated scenario with its objects built."""

    def __init__(self, raw):
        validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
        errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
        if errors:
            msgs = [f"{_field(e.absolute_path)}: {e.message}" for e in errors]
            raise ScenarioError("scenario does not match the schema:\n  " + "\n  ".join(msgs))
        self.raw = raw
        self.name = raw["name"]
        self.analyses = list(raw["analyses"])
        self.seed = int(raw.get("seed", 0))
        p = raw.get("probe", {})
        self.probe = TailProbe(R_start=p.get("R_start", 1.0), window_doublings=p.get("window_doublings", 8),
                               quad_tol=p.get("quad_tol", 1e-10))
        self.manifold = self._build("manifold", self._manifold)
        self.spacetime = self._build("spacetime", self._spacetime)
        ent = raw.get("entropy", {})
        self.density = ent.get("density")
        self.distribution = None
        if "distribution" in ent:
            self.distribution = self._build("entropy", self._distribution)
        self.points = self._build("samples", self._points)
        self._check_requirements()

    def _build(self, key, fn):
        try:
            return fn()
        except HoloParabolicError as exc:
            raise ScenarioError(f"{key}: {exc}") from None
        except ValueError as exc:
            raise ScenarioError(f"{key}: {exc}") from None

    def _manifold(self):
        d = self.raw.get("manifold")
        if d is None:
            return None
        return ModelManifold(d["n"], ScalarFunction.from_config(d["sigma"]), d.get("r_max"),
                             d.get("name", self.name))

    def _spacetime(self):
        d = self.raw.get("spacetime")
        if d is None:
            return None
        return GRWSpacetime(ScalarFunction.from_config(d["f"]), d["n"], d.get("fiber_sec_floor", 0.0),
                            d.get("interval"), self.name)

    def _distribution(self):
        spec = self.raw["entropy"]["distribution"]
        if spec == "saturating":
            if self.manifold is None:
                raise ScenarioError("a saturating distribution needs a manifold")
            return saturating_entropy(self.manifold)
        return RadialDistribution(ScalarFunction.from_config(spec))

    def _points(self):
        pts = [HypersurfacePointData.from_config(d) for d in self.raw.get("samples", [])]
        if self.raw.get("slices"):
            if self.spacetime is None:
                raise ScenarioError("slices need a spacetime")
            pts += [slice_point(self.spacetime, t) for t in self.raw["slices"]]
        return pts

    def _check_requirements(self):
        have = {
            "manifold": self.manifold is not None,
            "spacetime": self.spacetime is not None,
            "entropy": self.density is not None or self.distribution is not None,
            "density": self.density is not None,
            "distribution": self.distribution is not None,
            "points": bool(self.points),
            "thm32": "thm32" in self.raw,
            "simulation": "simulation" in self.raw,
            "recurrence": "recurrence" in self.raw,
        }
        missing = [f"{a} needs {need}" for a in self.analyses for need in _REQUIRES[a] if not have[need]]
        if missing:
            raise ScenarioError("missing inputs: " + "; ".join(missing))

    def bound_range(self):
        lo, hi = self.raw.get("bound_range", (self.probe.R_start / 1024.0, self.probe.R_end))
        if not lo < hi:
            raise ScenarioError("bound_range must be increasing")
        return float(lo), float(hi)

    def sim_config(self, seed):
        s = dict(self.raw["simulation"])
        return SimConfig(self.manifold, s.pop("r0"), s.pop("inner"), s.pop("outer"), seed=seed, **s)


# -- analyses -----------------------------------------------------------------

def _geometry(sc, seed, tables):
    m = sc.manifold
    radii = sc.raw.get("radii", [R for R in (0.5, 1.0, 2.0, 4.0, 8.0) if R < m.r_max])
    rows = []
    for R in radii:
        ball = m.ball(R)
        rr = ricci_range(m, R)
        rows.append({"R": R, "area": ball.area, "volume": ball.volume, "quad_error": ball.quad_error,
                     "ricci_radial": rr.radial, "ricci_tangential": rr.tangential})
    out = {"n": m.n, "sigma": m.sigma.to_config(), "radii": rows}
    if math.isinf(m.r_max):
        out["capacity"] = capacity_oracle(m, 1.0, sc.probe)
    return out


def _entropy(sc, seed, tables):
    m = sc.manifold
    lo, hi = sc.bound_range()
    out = {}
    for label, spec in (("density", sc.density and ConstantDensity(sc.density)),
                        ("distribution", sc.distribution)):
        if not spec:
            continue
        rep = check_bound(spec, m, lo, min(hi, 0.999 * m.r_max))
        part = {"bound": rep}
        tables.append((f"bound_{label}", ["R", "S", "area_over_4", "margin"],
                       zip(rep.radius_grid.tolist(), rep.lhs.tolist(), rep.rhs.tolist(), rep.margin.tolist())))
        if label == "density":
            part["volume_floor"] = check_volume_floor(m, sc.density, rep.radius_grid)
            part["entropy_l1"] = entropy_l1_condition(spec, sc.probe, m)
        else:
            part["entropy_l1"] = entropy_l1_condition(spec, sc.probe)
        out[label] = part
    return out


def _thm31(sc, seed, tables):
    return criterion_thm31(sc.manifold, sc.density, probe=sc.probe, bound_range=sc.bound_range())


def _thm32(sc, seed, tables):
    c = sc.raw["thm32"]
    return criterion_thm32(sc.manifold, sc.distribution, c["C1"], c["C2"], sc.probe,
                           samples=c.get("samples", 20_000), seed=seed)


def _thm33(sc, seed, tables):
    return criterion_thm33(sc.manifold, sc.distribution, sc.probe)


def _cor35(sc, seed, tables):
    return corollary35_report(sc.manifold, sc.density, sc.probe)


def _thm43(sc, seed, tables):
    return pipeline_thm43(sc.spacetime, sc.points, sc.manifold, sc.density, sc.probe,
                          complete=sc.raw.get("complete", True), bound_range=sc.bound_range())


def _prop44(sc, seed, tables):
    return pipeline_prop44(sc.spacetime, sc.points, sc.density, sc.manifold, sc.probe,
                           complete=sc.raw.get("complete", True))


def _simulate(sc, seed, tables):
    cfg = sc.sim_config(seed)
    stats = simulate_annulus(cfg)
    exact = exact_hitting_probability(sc.manifold, cfg.inner, cfg.r0, cfg.outer)
    return {"stats": stats, "exact": exact,
            "deviation_in_stderr": abs(stats.p_outer - exact) / stats.stderr if stats.stderr else None}


def _trend(sc, seed, tables):
    cfg = sc.sim_config(seed)
    bs = sc.raw["recurrence"]["b_sequence"]
    rep = recurrence_monte_carlo(cfg, bs, sc.probe)
    tables.append(("trend", ["b", "p_inner", "p_outer", "stderr"],
                   [(r["b"], r["p_inner"], r["p_outer"], r["stderr"]) for r in rep.rows]))
    esc = escape_probability(sc.manifold, cfg.inner, cfg.r0, sc.probe) if math.isinf(sc.manifold.r_max) else None
    return {"trend": rep, "escape": esc}


_RUNNERS = {"geometry": _geometry, "entropy": _entropy, "thm31": _thm31, "thm32": _thm32,
            "thm33": _thm33, "cor35": _cor35, "thm43": _thm43, "prop44": _prop44,
            "simulate": _simulate, "recurrence-trend": _trend}


def run_scenario(source, seed=None, csv_dir=None):
    """Execute every requested analysis; returns ``(bundle, failed)``.

    Analyses run in the fixed order of :data:`ANALYSES`; a numerical failure
    is recorded in place of the analysis result and sets ``failed``.
    """
    raw = load_scenario(source)
    sc = Scenario(raw)
    seed = sc.seed if seed is None else int(seed)
    start = time.perf_counter()
    results, failed, tables = {}, False, []
    for name in ANALYSES:
        if name not in sc.analyses:
            continue
        these = []
        try:
            results[name] = {"status": "ok", "report": _plain(_RUNNERS[name](sc, seed, these))}
        except (HoloParabolicError, ArithmeticError, ValueError) as exc:
            failed = True
            err = {"type": type(exc).__name__, "message": str(exc)}
            if getattr(exc, "stats", None) is not None:
                err["partial"] = _plain(exc.stats)
            results[name] = {"status": "error", "error": err}
        tables += [(f"{name}_{t}", h, rows) for t, h, rows in these]
    bundle = {"tool": "holoparabolic", "version": __version__, "scenario": raw, "seed": seed,
              "results": results, "wall_time": time.perf_counter() - start}
    if csv_dir:
        os.makedirs(csv_dir, exist_ok=True)
        for label, header, rows in tables:
            _csv_write(os.path.join(csv_dir, f"{sc.name}_{label}.csv"), header, rows)
    return bundle, failed


# -- entry point ----------------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="holoparabolic", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file or a built-in scenario")
    r.add_argument("scenario", help="path to a scenario JSON file, or a catalog name")
    r.add_argument("--out", help="write the result bundle here instead of stdout")
    r.add_argument("--seed", type=int, help="override the scenario seed (unsigned 64-bit)")
    r.add_argument("--csv", metavar="DIR", help="also write CSV tables into DIR")
    c = sub.add_parser("catalog", help="list built-in scenarios")
    c.add_argument("--json", action="store_true", help="print the full scenario definitions")
    e = sub.add_parser("explain", help="describe an analysis")
    e.add_argument("name", help="one of: " + ", ".join(ANALYSES))
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "catalog":
        if args.json:
            print(dumps(_catalog.catalog()))
        else:
            for s in _catalog.catalog():
                print(f"{s['name']:28s} {s.get('description', '')}")
        return 0
    if args.command == "explain":
        try:
            sys.stdout.write(explain(args.name))
        except UnknownAnalysis as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
        return 0
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        bundle, failed = run_scenario(args.scenario, args.seed, args.csv)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(bundle) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
