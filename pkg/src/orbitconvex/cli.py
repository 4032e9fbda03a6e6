"""Command-line entry point.

Subcommands::

    orbit   --action O2 --point 1,0 [--budget N]      orbit cloud as JSON
    slope   --action O2 --set radial:0,1 --point 2,0  slope estimates as CSV
    detect  --action O2 --set radial:1,1              slope-criterion convexity test
    verify  <scenario> [--config FILE] [flags]        run a verification scenario
    report  FILE...                                   summary table of report JSONs

Exit codes: 0 when every status is pass, 1 on a verification failure, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import re
import sys
import typing
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import DEFAULT_SEED
from .groups import GroupAction, orbit
from .report import VerificationReport
from .scenarios import SCENARIOS, ConfigError, parse_action, run_scenario, write_artifacts
from .submetry import DEFAULT_RADII, SaturatedSet, ascending_slope, convexity_detect, slope_csv

ENV_OUTPUT_DIR = "ORBITCONVEX_OUT"
DEFAULT_OUTPUT_DIR = "out"


# ---------------------------------------------------------------------------
# parsing helpers


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def parse_set(spec: str, action: GroupAction) -> SaturatedSet:
    """``radial:a,b`` | ``fibers:x1,x2;y1,y2`` | ``sublevel:w1,w2@level`` | JSON object."""
    text = spec.strip()
    try:
        if text.startswith("{"):
            try:
                return SaturatedSet.from_json(json.loads(text), action)
            except (json.JSONDecodeError, KeyError) as exc:
                raise ConfigError(f"set descriptor: {exc}") from None
        kind, _, body = text.partition(":")
        if kind == "radial":
            vals = _floats(body, "radial interval")
            if len(vals) != 2:
                raise ConfigError("radial set needs two numbers a,b")
            return SaturatedSet.radial(action, *vals)
        if kind == "fibers":
            reps = [_floats(part, "fiber representative") for part in body.split(";") if part.strip()]
            return SaturatedSet.fibers(action, reps)
        if kind == "sublevel":
            point, sep, level = body.partition("@")
            if not sep:
                raise ConfigError("sublevel set needs the form sublevel:w1,...,wn@level")
            return SaturatedSet.basic_sublevel(action, _floats(point, "seed point"), float(level))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown set kind {kind!r} (use radial, fibers, sublevel or JSON)")


def _point(text: str, dim: int) -> np.ndarray:
    p = np.array(_floats(text, "point"))
    if len(p) != dim:
        raise ConfigError(f"point has {len(p)} coordinates, the action needs {dim}")
    return p


def _locate(text: str, key: str) -> int:
    """Line number (1-based) of the first occurrence of a JSON key, or 1."""
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


@dataclass
class RunConfig:
    scenario: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    output_dir: str | None = None

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        """Strict JSON parsing; errors carry ``source:line`` anchors."""
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise ConfigError(f"{source}:1: top level must be an object")
        names = {f.name for f in dataclasses.fields(cls)}
        for key in obj:
            if key not in names:
                raise ConfigError(f"{source}:{_locate(text, key)}: unknown key {key!r}")
        if "scenario" not in obj:
            raise ConfigError(f"{source}:1: missing key 'scenario'")
        if obj["scenario"] not in SCENARIOS:
            raise ConfigError(f"{source}:{_locate(text, 'scenario')}: unknown scenario {obj['scenario']!r}")
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{source}:{_locate(text, 'params')}: params must be an object")
        allowed = {f.name for f in dataclasses.fields(SCENARIOS[obj["scenario"]].config)}
        for key in params:
            if key not in allowed:
                raise ConfigError(f"{source}:{_locate(text, key)}: unknown parameter {key!r} "
                                  f"for scenario {obj['scenario']!r}")
        seed = obj.get("seed", DEFAULT_SEED)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError(f"{source}:{_locate(text, 'seed')}: seed must be a 64-bit non-negative integer")
        return cls(obj["scenario"], dict(params), seed, obj.get("output_dir"))


def _field_parser(tp):
    """Converter from a command-line string to a config field's type."""
    tp_s = str(tp)
    if "list[list" in tp_s:
        return lambda s: [[int(x) for x in part.split(",")] for part in s.split(";") if part.strip()]
    if "list" in tp_s:
        return lambda s: _floats(s, "list")
    if "int" in tp_s and "float" not in tp_s:
        return int
    if "float" in tp_s:
        return float
    return str


# ---------------------------------------------------------------------------
# subcommands


def _output_dir(args) -> str:
    return args.output_dir or os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(report: VerificationReport) -> int:
    if report.passed:
        print(f"{report.scenario_id}: pass ({report.verdict})", file=sys.stderr)
        return 0
    failing = ", ".join(report.failing_metrics()) or "none"
    print(f"{report.scenario_id}: {report.status} ({report.verdict}); failing metrics: {failing}",
          file=sys.stderr)
    return 1


def cmd_orbit(args) -> int:
    action = parse_action(args.action, args.seed)
    v = _point(args.point, action.ambient_dim)
    cloud = orbit(action, v, budget=args.budget, seed=args.seed)
    _emit(json.dumps(cloud.to_json(), sort_keys=True) + "\n", args.output)
    return 0


def _radii(args) -> tuple[float, ...]:
    return tuple(_floats(args.radii, "radii")) if args.radii else DEFAULT_RADII


def cmd_slope(args) -> int:
    action = parse_action(args.action, args.seed)
    S = parse_set(args.set, action)
    ests = []
    for i, p in enumerate(args.point):
        try:
            ests.append(ascending_slope(S, _point(p, S.dim), _radii(args), args.budget, args.seed,
                                        relative=not args.absolute, index=i))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    _emit(slope_csv(ests), args.output)
    return 0


def cmd_detect(args) -> int:
    action = parse_action(args.action, args.seed)
    S = parse_set(args.set, action)
    rep, ests = convexity_detect(S, args.probes, _radii(args), args.tol, args.seed, args.budget,
                                 return_estimates=True)
    rep.config = {"command": "detect", "action": action.describe(), "set": S.to_json(),
                  "seed": args.seed, "probes": args.probes, "tol": args.tol}
    write_artifacts(rep, _output_dir(args), args.seed, texts={"slopes": slope_csv(ests)})
    sys.stdout.write(rep.to_json() + "\n")
    return _finish(rep)


def cmd_verify(args) -> int:
    name = args.scenario
    params: dict[str, Any] = {}
    seed = DEFAULT_SEED
    out = None
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc.strerror}") from None
        rc = RunConfig.from_text(text, args.config)
        if rc.scenario != name:
            raise ConfigError(f"{args.config}:{_locate(text, 'scenario')}: config is for "
                              f"{rc.scenario!r}, not {name!r}")
        params, seed, out = rc.params, rc.seed, rc.output_dir
    for f in dataclasses.fields(SCENARIOS[name].config):
        val = getattr(args, f"p_{f.name}", None)
        if val is not None:
            params[f.name] = val
    if args.seed is not None:
        seed = args.seed
    out = args.output_dir or out or os.environ.get(ENV_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR
    rep = run_scenario(name, params, seed=seed, output_dir=out, jobs=args.jobs)
    sys.stdout.write(rep.to_json() + "\n")
    return _finish(rep)


def cmd_report(args) -> int:
    rows = []
    all_pass = True
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(obj, dict) or "scenario_id" not in obj:
            raise ConfigError(f"{path}:1: not a verification report")
        rep = VerificationReport.from_dict(obj)
        all_pass &= rep.passed
        seed = rep.config.get("seed", rep.budgets.get("seed", ""))
        rows.append([rep.scenario_id, seed, rep.status, rep.verdict,
                     ";".join(rep.failing_metrics()), os.path.basename(path)])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario_id", "seed", "status", "verdict", "failing_metrics", "file"])
    w.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# argument parser


def _add_common(p: argparse.ArgumentParser, seed_default=DEFAULT_SEED):
    p.add_argument("--seed", type=int, default=seed_default, help=f"RNG seed (default {DEFAULT_SEED})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbitconvex", description="Convexity tests for orbit spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="dump an orbit cloud as JSON")
    p.add_argument("--action", required=True, help="e.g. O2, SO3:conj, O4x3, S3, D5, C5, pm2 or JSON")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--output", help="write to this file instead of stdout")
    _add_common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("slope", help="ascending-slope estimates as CSV")
    p.add_argument("--action", required=True)
    p.add_argument("--set", required=True, help="radial:a,b | fibers:x;y | sublevel:w@c | JSON")
    p.add_argument("--point", required=True, action="append", help="base point (repeatable)")
    p.add_argument("--radii", help="comma-separated radii (multiples of f(x) unless --absolute)")
    p.add_argument("--absolute", action="store_true")
    p.add_argument("--budget", type=int, default=32, help="samples per radius")
    p.add_argument("--output")
    _add_common(p)
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("detect", help="slope-criterion convexity detector")
    p.add_argument("--action", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--probes", type=int, default=200)
    p.add_argument("--radii")
    p.add_argument("--budget", type=int, default=32, help="samples per radius")
    p.add_argument("--tol", type=float, default=0.02)
    p.add_argument("--output-dir")
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("verify", help="run a verification scenario")
    vsub = p.add_subparsers(dest="scenario", required=True)
    for name, entry in SCENARIOS.items():
        q = vsub.add_parser(name, help=(entry.run.__doc__ or "").strip().splitlines()[0])
        q.add_argument("--config", help="JSON run config {scenario, params, seed, output_dir}")
        q.add_argument("--output-dir")
        q.add_argument("--jobs", type=int, default=1)
        _add_common(q, seed_default=None)
        hints = typing.get_type_hints(entry.config)
        for f in dataclasses.fields(entry.config):
            q.add_argument("--" + f.name.replace("_", "-"), dest=f"p_{f.name}",
                           type=_field_parser(hints.get(f.name, str)), default=None)
        q.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="merge report JSONs into a summary CSV")
    p.add_argument("files", nargs="+")
    p.add_argument("--output")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
