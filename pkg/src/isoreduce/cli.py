"""Command line: list the catalog, evaluate invariants on JSON records, run verification suites.

Exit codes: 0 success, 1 verification failure, 2 unreadable input or bad
arguments, 3 a record violating its configuration's constraints.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from isoreduce.errors import UsageError, ValidationError
from isoreduce.groups import Family, GroupElement
from isoreduce.poses import (
    AffStiefel,
    PointPose,
    PoseKind,
    PosOri,
    SpherePose,
    Stiefel,
    _make,
)
from isoreduce.reduction import CATALOG, LIFTED_KEYS, Configuration, catalog_eval, get_entry
from isoreduce import trials as harness

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_INVALID = 3

DEFAULT_TOL = 1e-10
SUITE_TOLS = {
    "invariance": 1e-9,
    "separation": 1e-7,
    "canonicalizer": 1e-10,
    "cross-reduction": 1e-9,
    "chain": 1e-9,
}
RHO_TOL = 1e-9


class ParseError(ValueError):
    pass


class RecordError(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"record {index}: {message}")
        self.index = index


# -- input parsing ---------------------------------------------------------


def _vector(obj, name: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        raise ParseError(f"{name} must be an array of numbers")
    v = np.array(obj, dtype=float)
    if dim is not None and v.shape != (dim,):
        raise ValidationError(f"{name} must have {dim} entries, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} has non-finite entries")
    return v


def _unit(obj, name: str, dim: int, tol: float) -> np.ndarray:
    v = _vector(obj, name, dim)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} must be a unit vector (norm {norm:.12g})")
    return v / norm


def _frame(obj: dict, tol: float) -> tuple[np.ndarray, np.ndarray]:
    a = _unit(_field(obj, "alpha"), "alpha", 3, tol)
    b = _unit(_field(obj, "beta"), "beta", 3, tol)
    if abs(a @ b) > tol:
        raise ValidationError(f"alpha and beta must be orthogonal (<alpha,beta> = {a @ b:.3g})")
    b = b - (a @ b) * a
    return a, b / np.linalg.norm(b)


def _field(obj: dict, name: str):
    if name not in obj:
        raise ParseError(f"missing field {name!r}")
    return obj[name]


def _group_pose(obj: dict, cfg: Configuration, tol: float) -> GroupElement:
    n = cfg.dim
    raw = _field(obj, "R")
    if isinstance(raw, list) and raw and all(isinstance(row, list) for row in raw):
        rows = [_vector(row, "R row") for row in raw]
        if any(row.shape != (n,) for row in rows) or len(rows) != n:
            raise ValidationError(f"R must be {n}x{n}")
        rot = np.array(rows)
    else:
        rot = _vector(raw, "R", n * n).reshape(n, n)
    if np.max(np.abs(rot.T @ rot - np.eye(n))) > tol:
        raise ValidationError("R is not orthogonal")
    u, _, vt = np.linalg.svd(rot)
    rot = u @ vt
    det = np.linalg.det(rot)
    if cfg.family.proper and det < 0:
        raise ValidationError(f"R must have det +1 for {cfg.group_name}")
    if cfg.family.affine:
        trans = _vector(_field(obj, "t"), "t", n)
    else:
        trans = _vector(obj.get("t", [0.0] * n), "t", n)
        if np.any(trans != 0):
            raise ValidationError(f"{cfg.group_name} poses carry no translation")
        trans = np.zeros(n)
    return GroupElement._raw(cfg.family, rot, trans)


def parse_pose(obj, cfg: Configuration, tol: float = DEFAULT_TOL):
    """Pose from its JSON form ``{"kind": ..., fields}``; validated, then projected onto its constraints."""
    if not isinstance(obj, dict):
        raise ParseError("pose must be an object")
    kind = obj.get("kind", "group" if "R" in obj else None)
    if kind is None:
        raise ParseError("pose needs a 'kind'")
    expected = cfg.pose.kind.value
    if kind != expected:
        raise ValidationError(f"pose kind {kind!r} does not match configuration pose {expected!r}")
    n = cfg.dim
    k = cfg.pose.kind
    if k == PoseKind.GROUP:
        return _group_pose(obj, cfg, tol)
    if k == PoseKind.POINT:
        return _make(PointPose, t=_vector(_field(obj, "t"), "t", n))
    if k == PoseKind.POS_ORI:
        t = _vector(_field(obj, "t"), "t", n)
        return _make(PosOri, t=t, alpha=_unit(_field(obj, "alpha"), "alpha", n, tol))
    if k == PoseKind.AFF_STIEFEL:
        t = _vector(_field(obj, "t"), "t", 3)
        a, b = _frame(obj, tol)
        return _make(AffStiefel, t=t, alpha=a, beta=b)
    if k == PoseKind.STIEFEL:
        a, b = _frame(obj, tol)
        return _make(Stiefel, alpha=a, beta=b)
    return _make(SpherePose, alpha=_unit(_field(obj, "alpha"), "alpha", 3, tol))


def pose_to_json(p) -> dict:
    if isinstance(p, GroupElement):
        return {"kind": "group", "R": p.rotation.tolist(), "t": p.translation.tolist()}
    if isinstance(p, PointPose):
        return {"kind": "point", "t": p.t.tolist()}
    if isinstance(p, PosOri):
        return {"kind": "pos-ori", "t": p.t.tolist(), "alpha": p.alpha.tolist()}
    if isinstance(p, AffStiefel):
        return {"kind": "aff-stiefel", "t": p.t.tolist(), "alpha": p.alpha.tolist(), "beta": p.beta.tolist()}
    if isinstance(p, Stiefel):
        return {"kind": "stiefel", "alpha": p.alpha.tolist(), "beta": p.beta.tolist()}
    return {"kind": "sphere", "alpha": p.alpha.tolist()}


def _ambient(obj, name: str, cfg: Configuration, tol: float) -> np.ndarray:
    if cfg.ambient.sphere:
        return _unit(obj, name, 3, tol)
    return _vector(obj, name, cfg.ambient.dim)


def parse_request(doc, config_key: str | None):
    """Returns (configuration, tolerance, records) where each record is (s, r, pose, context)."""
    if not isinstance(doc, dict):
        raise ParseError("request must be a JSON object")
    key = config_key or doc.get("config")
    if key is None:
        raise ParseError("no configuration given (use --config or a 'config' field)")
    if config_key and doc.get("config") not in (None, config_key):
        raise ParseError(f"--config {config_key} conflicts with request config {doc['config']}")
    try:
        cfg = get_entry(key).config
    except UsageError as err:
        raise ParseError(str(err)) from None
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("options must be an object")
    tol = options.get("tol", DEFAULT_TOL)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
        raise ParseError("options.tol must be a non-negative number")
    records = doc.get("records")
    if not isinstance(records, list):
        raise ParseError("'records' must be an array")
    parsed = []
    for i, rec in enumerate(records):
        try:
            if not isinstance(rec, dict):
                raise ParseError("record must be an object")
            s = _ambient(_field(rec, "s"), "s", cfg, tol)
            r = _ambient(_field(rec, "r"), "r", cfg, tol)
            p = parse_pose(_field(rec, "pose"), cfg, tol)
            context = rec.get("context")
            if context is not None:
                _vector(context, "context")
        except ParseError as err:
            raise ParseError(f"record {i}: {err}") from None
        except ValidationError as err:
            raise RecordError(i, str(err)) from None
        parsed.append((s, r, p, context))
    return cfg, float(tol), parsed


def evaluate_request(doc, config_key: str | None = None) -> dict:
    cfg, _, records = parse_request(doc, config_key)
    entry = get_entry(cfg)
    out = []
    for i, (s, r, p, context) in enumerate(records):
        try:
            fv = catalog_eval(cfg, s, r, p)
        except ValidationError as err:
            raise RecordError(i, str(err)) from None
        item = {"index": i, "values": fv.values.tolist()}
        if context is not None:
            item["context"] = context
        out.append(item)
    return {"config": cfg.key, "catalog": entry.metadata(), "labels": list(entry.labels), "records": out}


def response_to_csv(response: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(response["labels"])
    for rec in response["records"]:
        writer.writerow([repr(v) for v in rec["values"]])
    return buf.getvalue()


# -- verification ----------------------------------------------------------


def _configs(selector: str) -> list[str]:
    if selector == "all":
        return list(CATALOG)
    return [get_entry(selector).key]


def run_suite(suite: str, config: str = "all", seed: int = 0, trials: int = 1000, tol: float | None = None) -> dict:
    """Run one verification suite; returns the JSON-ready report with a top-level 'passed'."""
    tol = SUITE_TOLS[suite] if tol is None else tol
    results = []
    if suite == "invariance":
        for key in _configs(config):
            rep = harness.invariance_trial(key, seed, trials)
            results.append({"config": key, **_dev(rep), "passed": rep.passed(tol)})
    elif suite == "separation":
        for key in _configs(config):
            rep = harness.separation_trial(key, seed, trials, tol)
            results.append({"config": key, "pairs_per_population": trials, **rep.to_dict(), "passed": rep.passed()})
            del results[-1]["name"]
    elif suite == "canonicalizer":
        for key in _configs(config):
            cfg = get_entry(key).config
            canon = harness.canonicalizer_trial(cfg.pose, seed, trials, cfg.family)
            item = {"config": key, "trials": trials, "max_canonicalization_error": canon.max_deviation}
            ok = canon.passed(tol)
            if key in LIFTED_KEYS or cfg.pose.kind == PoseKind.GROUP:
                rho = harness.rho_independence_trial(key, seed, trials)
                item["max_rho_dependence"] = rho.max_deviation
                ok = ok and rho.passed(RHO_TOL)
            item["passed"] = ok
            results.append(item)
    elif suite == "cross-reduction":
        for fam, dim in _cross_targets(config):
            rep = harness.cross_reduction_trial(fam, dim, seed, trials)
            results.append({"config": rep.name, **rep.to_dict(), "passed": rep.passed(tol)})
            del results[-1]["name"]
    elif suite == "chain":
        rep = harness.chain_trial(seed, trials)
        results.append({"config": "SE3>SO3>SO2>e", **rep.to_dict(), "passed": rep.passed(tol)})
    else:
        raise UsageError(f"unknown suite {suite!r}")
    return {
        "suite": suite,
        "config": config,
        "seed": seed,
        "trials": trials,
        "tol": tol,
        "passed": all(r["passed"] for r in results),
        "results": results,
    }


def _dev(rep) -> dict:
    return {"trials": rep.trials, "max_deviation": rep.max_deviation}


def _cross_targets(config: str) -> list[tuple[Family, int]]:
    if config == "all":
        return [(Family.SE, 2), (Family.SE, 3)]
    token = config.split("/")[0]
    if token not in ("SE2", "SE3"):
        raise UsageError(f"cross-reduction runs for SE2 or SE3, not {config!r}")
    return [(Family.SE, int(token[-1]))]


def _failure_lines(report: dict) -> list[str]:
    lines = []
    for r in report["results"]:
        if r["passed"]:
            continue
        measured = {
            k: v for k, v in r.items() if k.startswith("max_") or k in ("false_merges", "false_splits")
        }
        lines.append(f"FAIL {report['suite']} {r['config']}: {measured} (tol {report['tol']})")
    return lines


# -- commands --------------------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_catalog(args) -> int:
    entries = [e.metadata() for e in CATALOG.values()]
    if args.json:
        sys.stdout.write(_dumps({"count": len(entries), "entries": entries}))
        return EXIT_OK
    for e in entries:
        sys.stdout.write(
            f"{e['key']:<20} G={e['group']:<6} H={e['stabilizer']:<6} "
            f"{e['features']} features: {', '.join(e['labels'])}\n"
        )
    sys.stdout.write(f"{len(entries)} configurations\n")
    return EXIT_OK


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_eval(args) -> int:
    try:
        doc = json.loads(_read(args.input))
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot read request: {err}", file=sys.stderr)
        return EXIT_PARSE
    try:
        response = evaluate_request(doc, args.config)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except RecordError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    text = response_to_csv(response) if args.output.endswith(".csv") else _dumps(response)
    _write(args.output, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        print("error: --trials must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = run_suite(args.suite, args.config, args.seed, args.trials, args.tol)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(_dumps(report))
    if not report["passed"]:
        for line in _failure_lines(report):
            print(line, file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoreduce", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the configuration catalog")
    p.add_argument("--json", action="store_true", help="machine-readable listing")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("eval", help="evaluate catalog invariants on a JSON request")
    p.add_argument("--config", help="configuration key, e.g. SE3/R3/pos-ori")
    p.add_argument("--input", default="-", help="request file, '-' for stdin")
    p.add_argument("--output", default="-", help="response file ('.csv' for CSV), '-' for stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=list(SUITE_TOLS))
    p.add_argument("--config", default="all", help="configuration key or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tol", type=float, default=None, help="override the suite threshold")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
