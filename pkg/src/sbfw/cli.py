"""Command-line front door: configure, run, and persist experiments.

Subcommands mirror the experiment operations (supercrit, bsc, oracle,
donsker, doobmeyer, localtime) plus ``dump`` for writing one walk's jump and
excursion CSVs.  Reports land in ``report.json`` (canonical, byte-stable for
a fixed seed and parameters regardless of worker count); execution details
such as wall-clock time and worker count go to ``run_meta.json``.

Exit codes: 0 all checks passed, 1 some check failed, 2 invalid usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytic, experiments
from .report import ExperimentReport
from .streams import replication_rng
from .walks import MassVector, build_sbfw, decompose

_SENTINEL = object()


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals: {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbfw",
        description="Simultaneous breadth-first walk experiments for giant-component limit laws.",
    )
    parser.add_argument("--version", action="version", version=f"sbfw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, reps_default=None) -> None:
        p.add_argument("--seed", type=int, default=_SENTINEL, help="RNG seed (u64)")
        p.add_argument("--reps", type=int, default=reps_default if reps_default is not None else _SENTINEL)
        p.add_argument("--workers", type=int, default=_SENTINEL,
                       help="worker processes (default: SBFW_WORKERS or all cores)")
        p.add_argument("--out", type=str, default=_SENTINEL, help="output directory")
        p.add_argument("--config", type=str, default=None,
                       help="config file (key=value lines or a JSON object); flags win")
        p.add_argument("--raw", action="store_true", default=_SENTINEL,
                       help="also write per-replication raw.csv")

    p = sub.add_parser("supercrit", help="fluctuations of the giant over a c-grid")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--c-grid", type=_float_list, default=_SENTINEL)
    common(p)

    p = sub.add_parser("bsc", help="fluctuations of the early giant over a t-grid")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--t-grid", type=_float_list, default=_SENTINEL)
    p.add_argument("--eps-exponent", type=float, default=_SENTINEL,
                   help="a in eps = n^-a, 0 < a < 1/3")
    common(p)

    p = sub.add_parser("oracle", help="walk route vs exact small-n partition law")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--c", type=float, default=_SENTINEL)
    common(p)

    p = sub.add_parser("donsker", help="marginal law of the centered walk")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--c", type=float, default=_SENTINEL)
    p.add_argument("--s-points", type=_float_list, default=_SENTINEL)
    common(p)

    p = sub.add_parser("doobmeyer", help="compensator moment checks")
    p.add_argument("--q", type=float, default=_SENTINEL)
    p.add_argument("--s", type=float, default=_SENTINEL)
    p.add_argument("--samples", type=int, default=_SENTINEL)
    common(p)

    p = sub.add_parser("localtime", help="conditional-exponential excursion depths")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--t", type=float, default=_SENTINEL)
    p.add_argument("--eps-exponent", type=float, default=_SENTINEL)
    p.add_argument("--min-length", type=str, default=_SENTINEL,
                   help="length threshold, or 'auto' for 0.1x the expected largest")
    common(p)

    p = sub.add_parser("dump", help="write one walk's jump and excursion CSVs")
    p.add_argument("--n", type=int, default=_SENTINEL)
    p.add_argument("--c", type=float, default=_SENTINEL)
    common(p)

    return parser


_DEFAULTS = {
    "supercrit": {"n": 20000, "c_grid": (1.5, 2.0, 3.0), "reps": 2000},
    "bsc": {"n": 1_000_000, "t_grid": (0.5, 1.0, 2.0), "eps_exponent": 0.2, "reps": 500},
    "oracle": {"n": 5, "c": 1.2, "reps": 100_000},
    "donsker": {"n": 100_000, "c": 1.5, "s_points": (0.2, 0.4), "reps": 2000},
    "doobmeyer": {"q": 1.0, "s": 1.0, "samples": 1_000_000},
    "localtime": {"n": 100_000, "t": 1.0, "eps_exponent": 0.2, "min_length": "auto", "reps": 500},
    "dump": {"n": 10, "c": 1.5},
}
_COMMON_DEFAULTS = {"seed": 1, "workers": None, "out": ".", "raw": False}


def _load_config(path: str, parser: argparse.ArgumentParser) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    values: dict = {}
    if stripped.startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            parser.error(f"invalid JSON config {path}: {exc}")
        if not isinstance(values, dict):
            parser.error(f"config {path} must hold a JSON object")
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                parser.error(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return {str(k).replace("-", "_"): v for k, v in values.items()}


def _coerce(key: str, value, parser: argparse.ArgumentParser):
    if key in ("c_grid", "t_grid", "s_points") and isinstance(value, str):
        return _float_list(value)
    if key in ("c_grid", "t_grid", "s_points") and isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    if key in ("n", "reps", "samples", "workers", "seed"):
        try:
            return int(value)
        except (TypeError, ValueError):
            parser.error(f"config value for {key} must be an integer, got {value!r}")
    if key in ("c", "q", "s", "eps_exponent"):
        try:
            return float(value)
        except (TypeError, ValueError):
            parser.error(f"config value for {key} must be a real, got {value!r}")
    if key == "raw" and isinstance(value, str):
        return value.lower() in ("1", "true", "yes", "on")
    return value


def _merge_options(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Flags override config-file values override defaults."""
    merged = dict(_COMMON_DEFAULTS)
    merged.update(_DEFAULTS[args.command])
    if getattr(args, "config", None):
        for key, value in _load_config(args.config, parser).items():
            if key == "config":
                continue
            if key not in merged:
                parser.error(f"unknown config key {key!r} for {args.command}")
            merged[key] = _coerce(key, value, parser)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is _SENTINEL:
            continue
        merged[key] = value
    return merged


def _validate(opts: dict, command: str, parser: argparse.ArgumentParser) -> None:
    if command in ("supercrit", "bsc", "oracle", "donsker", "localtime"):
        if opts["reps"] is None or opts["reps"] < 1:
            parser.error(f"--reps must be positive, got {opts['reps']}")
    if command == "doobmeyer" and opts["samples"] < 10_000:
        parser.error(f"--samples must be >= 10000, got {opts['samples']}")
    if command in ("bsc", "localtime"):
        a = opts["eps_exponent"]
        if not 0.0 < a < 1.0 / 3.0:
            parser.error(f"--eps-exponent must lie in (0, 1/3), got {a}")
    if command in ("supercrit", "bsc", "donsker", "localtime", "dump", "oracle"):
        if opts["n"] < 1:
            parser.error(f"--n must be positive, got {opts['n']}")
    if opts.get("workers") is not None and opts["workers"] < 1:
        parser.error(f"--workers must be >= 1, got {opts['workers']}")


def _canonical_config(opts: dict, command: str) -> dict:
    # workers and out are execution details: they may not influence report bytes
    skip = {"workers", "out", "raw"}
    cfg = {k: v for k, v in opts.items() if k not in skip}
    cfg["command"] = command
    return cfg


def _header_lines(cfg: dict) -> list[str]:
    payload = json.dumps(_json_ready(cfg), sort_keys=True)
    return [f"# sbfw {__version__}", f"# config {payload}"]


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _write_outputs(
    report: ExperimentReport, opts: dict, command: str, out_dir: Path, t_start: float
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _canonical_config(opts, command)
    payload = {
        "tool": {"name": "sbfw", "version": __version__},
        "config": _json_ready(cfg),
        "report": report.canonical_dict(),
    }
    (out_dir / "report.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    meta = {
        "wall_clock_ms": (time.perf_counter() - t_start) * 1e3,
        "experiment_wall_clock_ms": report.wall_clock_ms,
        "workers": experiments.resolve_workers(opts.get("workers")),
        "out": str(out_dir),
        "tool": {"name": "sbfw", "version": __version__},
        "config": _json_ready(cfg),
    }
    (out_dir / "run_meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if opts.get("raw"):
        with (out_dir / "raw.csv").open("w", encoding="utf-8") as fh:
            for line in _header_lines(cfg):
                fh.write(line + "\n")
            fh.write("rep_index,grid_point,value\n")
            for row in report.iter_raw():
                fh.write(",".join(str(v) for v in row) + "\n")


def _run_experiment(command: str, opts: dict) -> ExperimentReport:
    workers = opts.get("workers")
    if command == "supercrit":
        grid = experiments.RegimeGrid(kind="super_critical", n=opts["n"], c_grid=opts["c_grid"])
        return experiments.run_supercrit_fluctuations(
            grid, opts["reps"], opts["seed"], workers=workers
        )
    if command == "bsc":
        grid = experiments.RegimeGrid(
            kind="barely_super_critical",
            n=opts["n"],
            t_grid=opts["t_grid"],
            eps_exponent=opts["eps_exponent"],
        )
        return experiments.run_bsc_fluctuations(grid, opts["reps"], opts["seed"], workers=workers)
    if command == "oracle":
        return experiments.run_oracle_equivalence(
            opts["n"], opts["c"], opts["reps"], opts["seed"], workers=workers
        )
    if command == "donsker":
        return experiments.run_donsker_marginal(
            opts["n"], opts["c"], opts["s_points"], opts["reps"], opts["seed"], workers=workers
        )
    if command == "doobmeyer":
        return experiments.run_doob_meyer_check(
            opts["q"], opts["s"], opts["samples"], opts["seed"], workers=workers
        )
    if command == "localtime":
        min_length = opts["min_length"]
        if isinstance(min_length, str):
            if min_length != "auto":
                min_length = float(min_length)
            else:
                eps = float(opts["n"]) ** (-opts["eps_exponent"])
                min_length = 0.1 * analytic.rho(1.0 + opts["t"] * eps) / eps
        opts["min_length"] = min_length
        return experiments.run_local_time_check(
            opts["n"], opts["t"], opts["eps_exponent"], min_length,
            opts["reps"], opts["seed"], workers=workers,
        )
    raise AssertionError(command)


def _cmd_dump(opts: dict, out_dir: Path) -> int:
    """One supercritical-style walk: jump CSV plus excursion CSV."""
    n, c, seed = opts["n"], opts["c"], opts["seed"]
    g = replication_rng(seed, "dump", 0)
    xi = g.standard_exponential(n)
    walk = build_sbfw(MassVector.uniform(n, 1.0 / n), xi, c)
    excursions = decompose(walk)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _canonical_config(opts, "dump")
    header = _header_lines(cfg)
    with (out_dir / "walk_jumps.csv").open("w", encoding="utf-8") as fh:
        fh.write("\n".join(header) + "\n")
        fh.write("jump_time,jump_size\n")
        for t, m in zip(walk.jump_times, walk.jump_sizes):
            fh.write(f"{t!r},{m!r}\n")
    with (out_dir / "walk_excursions.csv").open("w", encoding="utf-8") as fh:
        fh.write("\n".join(header) + "\n")
        fh.write("start,length,pre_start_infimum\n")
        for e in excursions:
            fh.write(f"{e.start!r},{e.length!r},{e.pre_start_infimum!r}\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    opts = _merge_options(args, parser)
    _validate(opts, args.command, parser)
    out_dir = Path(opts["out"])

    if args.command == "dump":
        return _cmd_dump(opts, out_dir)

    t_start = time.perf_counter()
    try:
        report = _run_experiment(args.command, opts)
    except (ValueError, RuntimeError) as exc:
        parser.exit(2, f"sbfw {args.command}: {exc}\n")
    _write_outputs(report, opts, args.command, out_dir, t_start)
    failed = sorted(k for k, ok in report.passes.items() if not ok)
    for name, ok in sorted(report.passes.items()):
        print(f"[{args.command}] {'PASS' if ok else 'FAIL'} {name}")
    if failed:
        print(f"[{args.command}] {len(failed)} check(s) failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
