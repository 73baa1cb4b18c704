"""Command line front end.

Subcommands: ``shape``, ``simulate``, ``sweep``, ``verify`` and ``plot``.
Every run writes its outputs plus a JSON manifest (config echo, seeds,
versions, wall-clock) into ``--out-dir``; files appear atomically.

Exit codes: 0 ok, 2 config error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import CRITERIA, oracle_check
from .config import ConfigError, RunConfig, SweepSpec, law_to_dict, load_law, load_run, parse_alpha_grid, run_to_dict
from .env import LawError
from .experiments import ExperimentConfig, boundary_sweep, mc_limit_estimate, point_row
from .plotting import Series, render_svg, series_from_rows
from .shapes import exp_psi, psi_strict_x, psi_strict_y

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3
CSV_SCHEMA = "lpplab.points/1"
POINT_COLUMNS = ("label", "x_axis", "x", "y", "n", "estimate", "se", "replicas", "theory", "branch", "residual")
REPLICA_COLUMNS = ("label", "x", "y", "n", "replica", "value")
SHAPE_COLUMNS = ("alpha", "value", "branch", "root", "residual")
FORMULAS = {"strict-x": psi_strict_x, "strict-y": psi_strict_y, "exponential": exp_psi}


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    return buf.getvalue()


def _manifest(command, config_doc, seed, wall, outputs, extra=None) -> str:
    doc = {
        "command": command,
        "config": config_doc,
        "seed": seed,
        "csv_schema": CSV_SCHEMA,
        "versions": {
            "lpplab": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "wall_clock": wall,
        "outputs": sorted(outputs),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _seed(args, default):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LPP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"LPP_SEED must be an integer, got {env!r}") from None
    return default


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    kw = {"seed": _seed(args, cfg.seed)}
    if getattr(args, "replicas", None) is not None:
        kw["replicas"] = args.replicas
    if getattr(args, "n", None) is not None:
        kw["n"] = args.n
    if getattr(args, "threads", None) is not None:
        kw["threads"] = args.threads
    return replace(cfg, **kw)


def _point_rows(label, report, x_axis):
    rows, reps = [], []
    for p in report.points:
        d = point_row(p)
        d["label"] = label
        d["x_axis"] = p.x if x_axis == "x" else p.y
        rows.append(d)
        for r, v in enumerate(p.values):
            reps.append({"label": label, "x": p.x, "y": p.y, "n": p.n, "replica": r, "value": float(v)})
    return rows, reps


def _emit(out_dir: Path, stem, rows, reps, columns, emit, title, manifest_args):
    outputs = []
    if "csv" in emit or "svg" in emit or not emit:
        atomic_write(out_dir / f"{stem}.csv", _csv(rows, columns))
        outputs.append(f"{stem}.csv")
        if reps:
            atomic_write(out_dir / f"{stem}_replicas.csv", _csv(reps, REPLICA_COLUMNS))
            outputs.append(f"{stem}_replicas.csv")
    if "json" in emit:
        atomic_write(out_dir / f"{stem}.json", json.dumps(rows, indent=2, default=float) + "\n")
        outputs.append(f"{stem}.json")
    if "svg" in emit:
        series = []
        for label in dict.fromkeys(r.get("label", "") for r in rows):
            series += series_from_rows([r for r in rows if r.get("label", "") == label], label)
        atomic_write(out_dir / f"{stem}.svg", render_svg(series, title))
        outputs.append(f"{stem}.svg")
    command, doc, seed, t0, extra = manifest_args
    outputs.append(f"{stem}_manifest.json")
    atomic_write(out_dir / f"{stem}_manifest.json", _manifest(command, doc, seed, time.perf_counter() - t0, outputs, extra))
    return outputs


# ---------------------------------------------------------------------------
# subcommands


def cmd_shape(args) -> int:
    t0 = time.perf_counter()
    if args.law is None and args.config is None:
        raise ConfigError("shape needs --law or --config")
    law = load_law(args.law or args.config)
    f = FORMULAS[args.formula]
    alphas = parse_alpha_grid(args.alpha_grid)
    rows = []
    for a in alphas:
        x, y = (args.x, a * args.x) if args.side == "1alpha" else (a * args.y, args.y)
        r = f(law, x, y)
        rows.append({"alpha": a, "value": r.value, "branch": r.branch, "root": r.root, "residual": r.residual})
    doc = {"law": law_to_dict(law), "formula": args.formula, "alpha_grid": list(alphas), "side": args.side,
           "x": args.x, "y": args.y}
    out_dir = Path(args.out_dir)
    emit = set(args.emit or ["csv"])
    outputs = []
    atomic_write(out_dir / "shape.csv", _csv(rows, SHAPE_COLUMNS))
    outputs.append("shape.csv")
    if "json" in emit:
        atomic_write(out_dir / "shape.json", json.dumps(rows, indent=2) + "\n")
        outputs.append("shape.json")
    if "svg" in emit:
        s = Series(args.formula, [r["alpha"] for r in rows], [r["value"] for r in rows], "theory")
        atomic_write(out_dir / "shape.svg", render_svg([s], f"{args.formula} shape"))
        outputs.append("shape.svg")
    outputs.append("shape_manifest.json")
    atomic_write(out_dir / "shape_manifest.json", _manifest("shape", doc, None, time.perf_counter() - t0, outputs))
    if not args.quiet:
        sys.stdout.write(_csv(rows, SHAPE_COLUMNS))
    return EXIT_OK


def _load_cfg(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required")
    return _apply_overrides(load_run(args.config), args)


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    cfg = _load_cfg(args)
    ec = ExperimentConfig(cfg.law, cfg.geometry, cfg.convention, cfg.directions, cfg.n, cfg.replicas, cfg.seed, cfg.threads)
    rep = mc_limit_estimate(ec)
    rows, reps = _point_rows(cfg.title or "simulate", rep, "x")
    _emit(Path(args.out_dir), "simulate", rows, reps, POINT_COLUMNS, set(args.emit or ["csv"]), cfg.title,
          ("simulate", run_to_dict(cfg), cfg.seed, t0, None))
    if not args.quiet:
        sys.stdout.write(_csv(rows, POINT_COLUMNS))
    return EXIT_OK


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    cfg = _load_cfg(args)
    sweeps = cfg.sweeps or (SweepSpec(cfg.geometry, "alpha1", (0.25, 0.5, 0.75, 1.0)),)
    rows, reps, extra_cols = [], [], set()
    for k, s in enumerate(sweeps):
        ec = ExperimentConfig(cfg.law, s.geometry, cfg.convention, ((1.0, 1.0),), cfg.n, cfg.replicas, cfg.seed, cfg.threads)
        rep = boundary_sweep(ec, s.alphas, s.side)
        label = s.label or f"{s.geometry.value} {s.side}"
        r, rr = _point_rows(label, rep, "x" if s.side == "alpha1" else "y")
        for d in r:
            extra_cols |= {c for c in d if c not in POINT_COLUMNS}
        rows += r
        reps += rr
    columns = POINT_COLUMNS + tuple(sorted(extra_cols))
    _emit(Path(args.out_dir), "sweep", rows, reps, columns, set(args.emit or ["csv"]), cfg.title or "sweep",
          ("sweep", run_to_dict(cfg), cfg.seed, t0, None))
    if not args.quiet:
        sys.stdout.write(_csv(rows, columns))
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    lines, ok = [], True
    if args.suite == "oracle":
        bad = oracle_check(args.trials, seed=_seed(args, 0))
        ok = not bad
        lines.append(f"{'PASS' if ok else 'FAIL'} oracle: {len(bad)} mismatches over {args.trials} grids")
        lines += bad[:20]
    else:
        wanted = None if not args.only else {int(v) for v in args.only.split(",")}
        for crit in CRITERIA:
            if wanted is not None and crit.number not in wanted:
                continue
            res = crit()
            lines.append(res.line())
            ok = ok and res.passed
            sys.stdout.write(res.line() + "\n")
            sys.stdout.flush()
    if args.suite == "oracle":
        sys.stdout.write("\n".join(lines) + "\n")
    out_dir = Path(args.out_dir)
    atomic_write(out_dir / "verify.txt", "\n".join(lines) + "\n")
    doc = {"suite": args.suite, "trials": args.trials, "only": args.only}
    atomic_write(out_dir / "verify_manifest.json",
                 _manifest("verify", doc, _seed(args, 0), time.perf_counter() - t0, ["verify.txt", "verify_manifest.json"],
                           {"passed": ok}))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_plot(args) -> int:
    path = Path(args.csv)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    if not rows:
        raise ConfigError(f"{path} has no rows")
    if "estimate" in rows[0]:
        series = []
        for label in dict.fromkeys(r.get("label", "") for r in rows):
            series += series_from_rows([r for r in rows if r.get("label", "") == label], label)
    elif "alpha" in rows[0] and "value" in rows[0]:
        series = [Series("theory", [float(r["alpha"]) for r in rows], [float(r["value"]) for r in rows], "theory")]
    else:
        raise ConfigError(f"{path} does not follow the {CSV_SCHEMA} or shape schema")
    out = Path(args.out) if args.out else Path(args.out_dir) / (path.stem + ".svg")
    atomic_write(out, render_svg(series, args.title or path.stem))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpplab", description="Last-passage percolation in random environments.")
    p.add_argument("--version", action="version", version=f"lpplab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sim=True):
        sp.add_argument("--config", help="TOML config document")
        sp.add_argument("--seed", type=int, help="base seed (overrides config and LPP_SEED)")
        sp.add_argument("--out-dir", default="out", help="output directory")
        sp.add_argument("--emit", action="append", choices=["csv", "json", "svg"], help="output formats (repeatable)")
        sp.add_argument("--quiet", action="store_true", help="do not echo tables to stdout")
        if sim:
            sp.add_argument("--replicas", type=int)
            sp.add_argument("--n", type=int)
            sp.add_argument("--threads", type=int, help="worker threads (default: available cores)")

    sp = sub.add_parser("shape", help="evaluate a shape formula on an alpha grid")
    common(sp, sim=False)
    sp.add_argument("--law", help="TOML file holding a [law] table")
    sp.add_argument("--formula", choices=sorted(FORMULAS), required=True)
    sp.add_argument("--alpha-grid", default="0.05:1:0.05")
    sp.add_argument("--side", choices=["1alpha", "alpha1"], default="1alpha",
                    help="1alpha evaluates at (x, alpha x); alpha1 at (alpha y, y)")
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--y", type=float, default=1.0)
    sp.set_defaults(fn=cmd_shape)

    sp = sub.add_parser("simulate", help="single Monte Carlo run over the config directions")
    common(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("sweep", help="boundary sweeps listed in the config")
    common(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("verify", help="run the oracle or acceptance suite")
    common(sp, sim=False)
    sp.add_argument("--suite", choices=["oracle", "acceptance"], default="oracle")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--only", help="comma-separated acceptance criterion numbers")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("plot", help="render a CSV table to SVG")
    sp.add_argument("csv")
    sp.add_argument("--out")
    sp.add_argument("--out-dir", default="out")
    sp.add_argument("--title")
    sp.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        return args.fn(args)
    except (ConfigError, LawError, ValueError, KeyError) as e:
        sys.stderr.write(f"lpplab: config error: {e}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
