"""Command-line entry point: JSON on stdout, optional CSV tables.

Exit status is 0 on success, 1 when an operation fails and 2 when the request
itself cannot be parsed or validated.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import numerics
from .classifier import classify
from .counterexamples import (CounterexampleParams, certification_report, counterexample_young,
                              generate)
from .errors import InvariantViolation, OrliczError, ParameterWindow
from .gauges import (DiscreteDensity, capacity_gauge, hausdorff_admissible, hausdorff_power_log,
                     kernel_potential)
from .transforms import DimensionContext, a_n_minus_1, modulus_of_continuity
from .young import SCHEMA_VERSION, PiecewiseAffine, PiecewiseAffineSpec, PowerLog, from_dict

COMMANDS = ("classify", "conjugate", "transform", "modulus", "gauge", "counterexample", "certify", "potential")
SAMPLE_GRID = np.logspace(-2, 4, 25)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orlicz-regularity", description="Young-function calculus and regularity verdicts.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--young", help="power_log:p=..,alpha=..[,c=..]  |  piecewise:file=..  |  json:file=..")
    p.add_argument("--n", type=int, help="ambient dimension (>= 2)")
    p.add_argument("--sigma", action="append", default=[], help="extra capacity weight: 1, log or log^k")
    p.add_argument("--gauge-h", action="append", default=[],
                   help="Hausdorff gauge s^a log^b(1/s) given as 'a,b'")
    p.add_argument("--csv-dir", help="mirror numeric tables to CSV files here")
    p.add_argument("--config", help="JSON file overriding numeric thresholds")
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--K", type=int, help="number of generated slopes (default 40)")
    p.add_argument("--t1", type=float, help="first knot (default 1)")
    p.add_argument("--m0", type=float, help="first slope (default 1)")
    p.add_argument("--points", help="CSV of points: n coordinates and an optional weight per row")
    p.add_argument("--at", help="evaluation point, comma separated")
    return p


# ---------------------------------------------------------------------------
# descriptors

def _kv(body: str) -> dict:
    out = {}
    for item in filter(None, body.split(",")):
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_young(desc: str):
    if not desc or ":" not in desc:
        raise UsageError("--young must look like kind:key=value,...")
    kind, body = desc.split(":", 1)
    kv = _kv(body)
    try:
        if kind == "power_log":
            c = float(kv["c"]) if "c" in kv else None
            return PowerLog(float(kv["p"]), float(kv.get("alpha", 0.0)), c, float(kv.get("coef", 1.0)))
        if kind == "piecewise":
            doc = json.loads(Path(kv["file"]).read_text())
            spec = PiecewiseAffineSpec(tuple(float(x) for x in doc["knots"]), tuple(float(x) for x in doc["slopes"]))
            return PiecewiseAffine(spec)
        if kind == "json":
            return from_dict(json.loads(Path(kv["file"]).read_text()))
    except KeyError as exc:
        raise UsageError(f"missing key {exc} in --young") from None
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad --young: {exc}") from None
    raise UsageError(f"unknown function kind {kind!r}")


def _gauge_h(spec: str):
    try:
        a, b = (float(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"--gauge-h expects 'power,log_power', got {spec!r}") from None
    return hausdorff_power_log(a, b)


# ---------------------------------------------------------------------------
# output helpers

def clean(x: Any):
    """JSON-safe copy: inf as a string, nan as null, numpy scalars as floats."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def write_csv(directory: str | None, name: str, header, rows):
    if not directory:
        return None
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{name}.csv"
    with target.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return str(target)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs --{', --'.join(missing)}")


def _samples(A, grid=SAMPLE_GRID):
    grid = grid[grid < A.domain_cap]
    return [[float(t), float(v)] for t, v in zip(grid, A._value_capped(grid))]


def _params(args) -> CounterexampleParams:
    _need(args, "n", "q", "alpha")
    return CounterexampleParams(n=args.n, q=args.q, alpha=args.alpha, beta=args.beta,
                                t1=1.0 if args.t1 is None else args.t1,
                                m0=1.0 if args.m0 is None else args.m0,
                                K=40 if args.K is None else args.K)


# ---------------------------------------------------------------------------
# commands; each returns (result, provenance, warnings)

def cmd_classify(args):
    _need(args, "young", "n")
    A = parse_young(args.young)
    v = classify(A, DimensionContext(args.n), sigmas=args.sigma, gauges_h=[_gauge_h(h) for h in args.gauge_h])
    doc = v.to_dict()
    if v.modulus is not None:
        write_csv(args.csv_dir, "modulus", ["r", "omega"], v.modulus.samples)
    prov = [{"tag": p["tag"], "outcome": p["verdict"].get("outcome")} for p in doc["provenance"]]
    return doc, prov, list(v.notes)


def cmd_conjugate(args):
    _need(args, "young")
    A = parse_young(args.young)
    At = A.conjugate()
    result = {"input": A.label, "conjugate": At.label, "samples": _samples(At)}
    try:
        result["conjugate_json"] = At.to_dict()
    except OrliczError:
        pass
    write_csv(args.csv_dir, "conjugate", ["t", "conjugate"], result["samples"])
    return result, [{"tag": "Young conjugate", "method": "closed form" if At.kind != "callable" else "Fenchel equality"}], []


def cmd_transform(args):
    _need(args, "young", "n")
    A = parse_young(args.young)
    T = a_n_minus_1(A, DimensionContext(args.n))
    result = {"input": A.label, "transform": T.label, "samples": _samples(T)}
    write_csv(args.csv_dir, "transform", ["t", "A_n_minus_1"], result["samples"])
    return result, [{"tag": f"A_{args.n - 1} transform", "method": "closed form" if T.kind == "power_log" else "tabulated"}], []


def cmd_modulus(args):
    _need(args, "young", "n")
    A = parse_young(args.young)
    M = modulus_of_continuity(A, DimensionContext(args.n))
    write_csv(args.csv_dir, "modulus", ["r", "omega"], M.samples)
    return M.to_dict(), [{"tag": "everywhere continuity [ours]", "outcome": "diverges"}], list(M.notes)


def cmd_gauge(args):
    _need(args, "young", "n")
    A = parse_young(args.young)
    ctx = DimensionContext(args.n)
    An1 = a_n_minus_1(A, ctx)
    gauges, prov = [], []
    for s in (args.sigma or ["1"]):
        g = capacity_gauge(A, ctx, s, An1)
        gauges.append(g.to_dict())
        prov.append({"tag": "capacity weight", "sigma": s, "outcome": g.admissibility.outcome.value})
    base = capacity_gauge(A, ctx, (args.sigma or ["1"])[0], An1)
    hs = []
    for h in args.gauge_h:
        H = _gauge_h(h)
        v = hausdorff_admissible(H, base, ctx)
        hs.append({"gauge": H.label, "verdict": v.to_dict()})
        prov.append({"tag": "continuity off an h-null set [hB]", "gauge": H.label, "outcome": v.outcome.value})
    return {"capacity_gauges": gauges, "hausdorff": hs}, prov, []


def cmd_counterexample(args):
    params = _params(args)
    spec = generate(params, certify=False)
    report = certification_report(params, spec)
    A = PiecewiseAffine(spec)
    write_csv(args.csv_dir, "counterexample", ["k", "t_k", "m_k"],
              [[k, t, m] for k, (t, m) in enumerate(zip(A.knots, spec.slopes))])
    result = {"params": params.to_dict(), "spec": A.to_dict(), "certification": report}
    return result, [{"tag": c["check"], "passed": c["passed"]} for c in report["checks"]], []


def cmd_certify(args):
    _need(args, "young")
    params = _params(args)
    A = parse_young(args.young)
    if not isinstance(A, PiecewiseAffine):
        raise UsageError("certify expects a piecewise-affine --young")
    report = certification_report(params, A.spec)
    return report, [{"tag": c["check"], "passed": c["passed"]} for c in report["checks"]], []


def cmd_potential(args):
    _need(args, "young", "n", "points", "at")
    A = parse_young(args.young)
    ctx = DimensionContext(args.n)
    gauge = capacity_gauge(A, ctx, (args.sigma or ["1"])[0])
    rows = [[float(x) for x in r] for r in csv.reader(Path(args.points).read_text().splitlines()) if r]
    pts = np.array([r[: args.n] for r in rows])
    w = np.array([r[args.n] if len(r) > args.n else 1.0 for r in rows])
    x = np.array([float(v) for v in args.at.split(",")])
    if x.size != args.n or pts.shape[1] != args.n:
        raise UsageError("point dimension does not match --n")
    f = DiscreteDensity(points=pts, weights=w)
    val = kernel_potential(f, x, gauge)
    return {"gauge": gauge.label, "at": x.tolist(), "potential": val, "mass": f.mass()}, \
        [{"tag": "kernel potential", "gauge": gauge.label}], []


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    echo: dict = {}
    try:
        args = build_parser().parse_args(argv)
        echo = {k: v for k, v in sorted(vars(args).items()) if v not in (None, [])}
        if args.n is not None and args.n < 2:
            raise UsageError("--n must be >= 2")
        numerics.reset_config()
        if args.config:
            numerics.set_config(**json.loads(Path(args.config).read_text()))
        result, prov, warnings = HANDLERS[args.command](args)
    except (UsageError, ParameterWindow, InvariantViolation, TypeError, ValueError) as exc:
        stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc), "kind": "usage",
                                 "inputs_echo": clean(echo)}, indent=2) + "\n")
        return 2
    except OrliczError as exc:
        stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc), "kind": type(exc).__name__,
                                 "inputs_echo": clean(echo)}, indent=2) + "\n")
        return 1
    finally:
        numerics.reset_config()
    doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "inputs_echo": clean(echo),
           "result": clean(result), "provenance": clean(prov), "warnings": clean(warnings)}
    stdout.write(json.dumps(doc, indent=2) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
