"""Command line front end: constants, audits, single runs and sweeps.

Configuration files are flat ``key = value`` text; ``#`` starts a comment.
Keys are the keyword arguments of the selected pipeline in
:mod:`coupled_hartree.experiments` plus a few reserved ones:

``experiment``
    pipeline name (``run`` and ``sweep``); the command line argument wins.
``seed``
    integer passed to pipelines that draw random numbers.
``sweep.<key>``
    comma-separated values for ``<key>``; ``sweep`` runs the product grid.
``workers``
    process count for ``sweep`` (default 1).

Every run writes a JSON record with a schema version, the echoed config and
its hash, all measured values and every named check.  Exit codes: 0 when all
asserted checks pass, 1 when a conclusion check fails, 2 for configuration
errors, 3 for guard failures in ``--strict`` mode, 4 for solver
non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import inspect
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import bounds
from .errors import ConfigError, HartreeError
from .experiments import CONVERGENCE_CHECKS, EXPERIMENTS, GUARD_CHECKS, ExperimentResult

__all__ = [
    "SCHEMA_VERSION",
    "RunRecord",
    "parse_config",
    "load_config",
    "build_kwargs",
    "run_experiment",
    "sweep",
    "exit_code",
    "main",
]

SCHEMA_VERSION = 1
RESERVED = {"experiment", "seed", "workers"}

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD, EXIT_CONVERGENCE = 0, 1, 2, 3, 4
_ERROR_EXIT = {"config": EXIT_CONFIG, "guard": EXIT_GUARD, "convergence": EXIT_CONVERGENCE}


# ---------------------------------------------------------------------------
# configuration


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a dict of raw strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path: Optional[str]) -> dict[str, str]:
    if path is None:
        return {}
    try:
        return parse_config(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _convert(raw: str, default: Any, key: str) -> Any:
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return raw


def _signature(name: str) -> inspect.Signature:
    fn = EXPERIMENTS[name]
    return inspect.signature(getattr(fn, "__wrapped__", fn))


def build_kwargs(name: str, cfg: dict[str, str], seed: Optional[int] = None) -> dict[str, Any]:
    """Typed keyword arguments for pipeline ``name`` from raw config strings."""
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(sorted(EXPERIMENTS))}")
    params = _signature(name).parameters
    kwargs: dict[str, Any] = {}
    for key, raw in cfg.items():
        if key in RESERVED or key.startswith("sweep."):
            continue
        if key not in params:
            raise ConfigError(f"experiment {name!r} has no parameter {key!r}")
        kwargs[key] = _convert(raw, params[key].default, key)
    if "seed" in params:
        if seed is not None:
            kwargs["seed"] = seed
        elif "seed" in cfg:
            kwargs["seed"] = _convert(cfg["seed"], 0, "seed")
    return kwargs


# ---------------------------------------------------------------------------
# records


def _jsonable(x: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings used by the loader."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if x is None or isinstance(x, str):
        return x
    return str(x)


_SPECIAL = {"NaN": float("nan"), "Infinity": float("inf"), "-Infinity": float("-inf")}


def _restore(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _restore(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_restore(v) for v in x]
    if isinstance(x, str) and x in _SPECIAL:
        return _SPECIAL[x]
    return x


def config_hash(experiment: str, kwargs: dict) -> str:
    blob = json.dumps({"experiment": experiment, **_jsonable(kwargs)}, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class RunRecord:
    experiment: str
    config: dict
    config_hash: str
    strict: bool
    values: dict
    checks: dict
    guards: dict
    guarded: bool
    passed: bool
    notes: list = field(default_factory=list)
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = _restore(json.loads(text))
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported record schema version {version!r}")
        return cls(**data)


def _record(name: str, kwargs: dict, res: ExperimentResult, strict: bool) -> RunRecord:
    guards = {k: v for k, v in res.checks.items() if k in GUARD_CHECKS}
    asserted = {k: v for k, v in res.checks.items() if k not in GUARD_CHECKS}
    guarded = all(guards.values())
    return RunRecord(
        experiment=name,
        config=dict(kwargs),
        config_hash=config_hash(name, kwargs),
        strict=strict,
        values={k: v for k, v in res.values.items()},
        checks=asserted,
        guards=guards,
        guarded=guarded,
        passed=all(asserted.values()) and (guarded or not strict),
        notes=list(res.notes) + ([] if guarded else ["unguarded run: hypotheses not met"]),
        wall_time=res.wall_time,
    )


def exit_code(rec: RunRecord) -> int:
    if rec.strict and not rec.guarded:
        return EXIT_GUARD
    if any(not rec.checks.get(k, True) for k in CONVERGENCE_CHECKS):
        return EXIT_CONVERGENCE
    return EXIT_OK if all(rec.checks.values()) else EXIT_FAIL


def run_experiment(name: str, kwargs: dict, strict: bool = False) -> tuple[RunRecord, ExperimentResult]:
    res = EXPERIMENTS[name](**kwargs)
    return _record(name, kwargs, res, strict), res


# ---------------------------------------------------------------------------
# output


def _write_profiles(out: Path, stem: str, res: ExperimentResult) -> None:
    for pname, (r, vals) in res.profiles.items():
        with open(out / f"{stem}_{pname}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "value"])
            for a, b in zip(r, vals):
                w.writerow([repr(float(a)), repr(float(b))])


def _emit(rec: RunRecord, res: ExperimentResult, out: Optional[Path], stem: str) -> None:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.json").write_text(rec.to_json(), encoding="utf-8")
        _write_profiles(out, stem, res)


def _summary(rec: RunRecord) -> str:
    lines = [f"{rec.experiment}: {'PASS' if rec.passed else 'FAIL'} ({rec.wall_time:.1f} s)"]
    for k, v in sorted(rec.guards.items()):
        lines.append(f"  guard {k}: {'ok' if v else 'VIOLATED'}")
    for k, v in sorted(rec.checks.items()):
        lines.append(f"  {k}: {'pass' if v else 'FAIL'}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# sweeps


SWEEP_COLUMNS = ["p", "beta", "eps", "alpha", "alpha_minus", "delta", "classification", "passed", "failed_checks"]


def _sweep_point(args) -> tuple[int, str, dict]:
    i, name, kwargs, strict = args
    try:
        rec, _ = run_experiment(name, kwargs, strict)
        return i, rec.to_json(), {}
    except HartreeError as exc:
        return i, "", {"error": f"{type(exc).__name__}: {exc}", "code": exc.code}


def _effective(name: str, kwargs: dict) -> dict:
    """Pipeline arguments with defaults filled in."""
    full = {k: v.default for k, v in _signature(name).parameters.items() if v.default is not inspect.Parameter.empty}
    full.update(kwargs)
    return full


def _sweep_row(kwargs: dict, rec: Optional[RunRecord], err: dict) -> dict:
    row = {c: "" for c in SWEEP_COLUMNS}
    for k in ("p", "beta", "eps"):
        if k in kwargs:
            row[k] = kwargs[k]
    if rec is None:
        row["passed"] = False
        row["failed_checks"] = err.get("error", "")
        return row
    v = rec.values
    row["alpha"] = v.get("alpha", v.get("energy", ""))
    row["alpha_minus"] = v.get("alpha_minus", "")
    row["delta"] = v.get("delta", "")
    row["classification"] = v.get("classification", "")
    row["passed"] = rec.passed
    row["failed_checks"] = ";".join(sorted(k for k, ok in rec.checks.items() if not ok))
    return row


def sweep(
    name: str, cfg: dict[str, str], seed: Optional[int], strict: bool, out: Optional[Path], workers: int = 1
) -> tuple[list[dict], list[Optional[RunRecord]]]:
    """Run ``name`` over the product of all ``sweep.<key>`` value lists."""
    axes = {k[len("sweep.") :]: [v.strip() for v in raw.split(",") if v.strip()] for k, raw in cfg.items() if k.startswith("sweep.")}
    if not axes:
        raise ConfigError("a sweep needs at least one 'sweep.<key> = v1, v2, ...' entry")
    base = {k: v for k, v in cfg.items() if not k.startswith("sweep.")}
    jobs = []
    for i, combo in enumerate(itertools.product(*axes.values())):
        point = dict(base)
        point.update(zip(axes.keys(), combo))
        jobs.append((i, name, build_kwargs(name, point, seed), strict))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = sorted(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows, records = [], []
    for (i, _, kwargs, _), (_, text, err) in zip(jobs, results):
        rec = RunRecord.from_json(text) if text else None
        records.append(rec)
        rows.append(_sweep_row(_effective(name, kwargs), rec, err))
        if out is not None and rec is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"sweep_{i:04d}.json").write_text(rec.to_json(), encoding="utf-8")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return rows, records


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--seed", type=int, help="random seed for pipelines that use one")
    common.add_argument("--strict", action="store_true", help="fail (exit 3) when a guard is violated")
    common.add_argument("--out", help="directory for JSON records and CSV tables")
    ap = argparse.ArgumentParser(prog="coupled-hartree", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("constants", parents=[common], help="closed-form constants with oracle agreement")
    c.add_argument("--p", type=float, default=2.5)
    c.add_argument("--beta", type=float, default=1.0)
    c.add_argument("--lam", type=float, default=1.0)
    c.add_argument("--rho-min", type=float, default=1.0)
    sub.add_parser("audit", parents=[common], help="gradient, fibering and Coulomb identity audit")
    r = sub.add_parser("run", parents=[common], help="run one experiment")
    r.add_argument("experiment", nargs="?", help=f"one of: {', '.join(sorted(EXPERIMENTS))}")
    s = sub.add_parser("sweep", parents=[common], help="run an experiment over sweep.<key> ranges")
    s.add_argument("experiment", nargs="?")
    s.add_argument("--workers", type=int)
    return ap


def _main(argv: Optional[list[str]]) -> int:
    args = _parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    cfg = load_config(args.config)
    if args.command == "constants":
        rows = bounds.constants_table(args.p, args.beta, args.lam, args.rho_min)
        text = bounds.constants_csv(rows)
        sys.stdout.write(text)
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / "constants.csv").write_text(text, encoding="utf-8")
        return EXIT_OK if all(r.agree for r in rows) else EXIT_FAIL
    if args.command == "audit":
        name = "audit"
    else:
        name = args.experiment or cfg.get("experiment")
        if not name:
            raise ConfigError("no experiment given on the command line or in the config")
    if args.command == "sweep":
        workers = args.workers or int(cfg.get("workers", "1"))
        rows, records = sweep(name, cfg, args.seed, args.strict, out, workers)
        w = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        codes = [exit_code(r) if r is not None else EXIT_CONVERGENCE for r in records]
        return max(codes) if any(codes) else EXIT_OK
    kwargs = build_kwargs(name, cfg, args.seed)
    rec, res = run_experiment(name, kwargs, args.strict)
    _emit(rec, res, out, name)
    print(_summary(rec))
    return exit_code(rec)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        return _main(argv)
    except HartreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _ERROR_EXIT.get(exc.code, EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
