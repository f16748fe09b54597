"""Benchmark harness: experiment configs, sweeps, rate fitting, CLI.

An experiment config is an INI file:

    [problem]
    id = quad10            ; a name registered in the problem table

    [solver]
    epsilon = 1e-6
    L0 = 1.0
    max_outer = 500
    ; optional: D, delta_pu, max_inner

    [sweep]
    p = 1, 1.5, 2
    delta_u = 0, 0.01      ; realized as a value perturbation of that size
    delta_pu = 0
    noise_mode = fixed_direction

    [output]
    dir = results          ; overridden by the UNIGRAD_OUTPUT_DIR env var

Each sweep cell (one combination of p, delta_u, delta_pu) produces a trace
CSV plus a row in summary.csv; trace CSVs are byte-deterministic for a
given config, the summary is deterministic except its wall-clock column.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
import time
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .core import SolverConfig
from .oracles import NoiseSpec
from .problems import make_problem
from .solver import (
    RunResult,
    TraceRecord,
    oracle_call_identity,
    run,
    trace_from_csv,
    trace_to_csv,
)

__all__ = [
    "ExperimentConfig",
    "RateFit",
    "load_config",
    "run_experiment",
    "fit_rate",
    "error_floor",
    "emit_plotdata",
    "trace_gaps",
    "default_window",
    "SUMMARY_COLUMNS",
    "main",
]

SUMMARY_COLUMNS = ["problem_id", "p", "nu", "delta_u", "delta_pu",
                   "final_gap", "slope", "r_squared", "oracle_calls",
                   "wall_ms"]

OUTPUT_ENV_VAR = "UNIGRAD_OUTPUT_DIR"


@dataclass
class ExperimentConfig:
    """A parsed experiment: one problem, solver settings, sweep lists."""

    problem_id: str
    epsilon: float
    L0: float = 1.0
    max_outer: int = 500
    max_inner: int = 60
    D: Optional[float] = None
    p_values: tuple = (2.0,)
    delta_u_values: tuple = (0.0,)
    delta_pu_values: tuple = (0.0,)
    noise_mode: str = "fixed_direction"
    noise_diameter: float = 1.0
    seed: int = 0
    output_dir: str = "."

    def cells(self):
        return list(product(self.p_values, self.delta_u_values,
                            self.delta_pu_values))


@dataclass
class RateFit:
    """Least-squares slope of log(gap) against log(k) over an index window."""

    slope: float
    window: tuple
    r_squared: float
    ok: bool = True


def _floats(text) -> tuple:
    return tuple(float(v) for v in str(text).split(",") if v.strip() != "")


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config not readable: {path}")
    prob = parser["problem"]
    solver = parser["solver"] if parser.has_section("solver") else {}
    sweep = parser["sweep"] if parser.has_section("sweep") else {}
    output = parser["output"] if parser.has_section("output") else {}

    cfg = ExperimentConfig(
        problem_id=prob["id"],
        epsilon=float(solver.get("epsilon", "1e-6")),
        L0=float(solver.get("L0", "1.0")),
        max_outer=int(solver.get("max_outer", "500")),
        max_inner=int(solver.get("max_inner", "60")),
        D=float(solver["D"]) if "D" in solver else None,
        p_values=_floats(sweep.get("p", "2")),
        delta_u_values=_floats(sweep.get("delta_u", "0")),
        delta_pu_values=_floats(sweep.get("delta_pu", "0")),
        noise_mode=sweep.get("noise_mode", "fixed_direction"),
        noise_diameter=float(sweep.get("noise_diameter", "1.0")),
        seed=int(sweep.get("seed", "0")),
        output_dir=output.get("dir", "."),
    )
    for p in cfg.p_values:
        if not (1.0 <= p <= 2.0):
            raise ValueError(f"swept p={p} outside [1, 2]")
    for v in cfg.delta_u_values + cfg.delta_pu_values:
        if v < 0:
            raise ValueError("swept error levels must be nonnegative")
    return cfg


def resolve_output_dir(cfg: ExperimentConfig) -> str:
    return os.environ.get(OUTPUT_ENV_VAR) or cfg.output_dir


def _cell_tag(problem_id, p, delta_u, delta_pu) -> str:
    return (f"{problem_id}_p{p:g}_du{delta_u:g}_dpu{delta_pu:g}"
            .replace(".", "_"))


def trace_gaps(trace, f_star: Optional[float] = None):
    """Per-iteration (k, gap) pairs.

    With an analytic optimum the gap is F(y_k) - f_star.  Without one, the
    smallest recorded value stands in for the optimum, which loses the last
    points of the series but leaves the slope of the descent intact.
    """
    values = [(rec.k, rec.F_y) for rec in trace if rec.F_y is not None]
    if f_star is None:
        f_star = min(v for _, v in values)
    return [(k, v - f_star) for k, v in values]


def default_window(k_max: int) -> tuple:
    """Fit window skipping the transient head and the floor-bound tail."""
    return (max(10, int(0.2 * k_max)), int(0.8 * k_max))


def fit_rate(trace, window: Optional[tuple] = None,
             f_star: Optional[float] = None) -> RateFit:
    """Log-log regression of gap against iteration index.

    Nonpositive gaps inside the window are dropped (the run already
    converged there); with fewer than 5 usable points the fit is flagged
    unavailable rather than fabricated.
    """
    gaps = trace_gaps(trace, f_star)
    if not gaps:
        return RateFit(math.nan, (0, 0), math.nan, ok=False)
    k_max = max(k for k, _ in gaps)
    if window is None:
        window = default_window(k_max)
    lo, hi = window
    pts = [(k, g) for k, g in gaps if lo <= k <= hi and g > 0 and k > 0]
    if len(pts) < 5:
        return RateFit(math.nan, (lo, hi), math.nan, ok=False)
    logk = np.log([k for k, _ in pts])
    logg = np.log([g for _, g in pts])
    slope, intercept = np.polyfit(logk, logg, 1)
    fitted = slope * logk + intercept
    ss_res = float(np.sum((logg - fitted) ** 2))
    ss_tot = float(np.sum((logg - logg.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), (lo, hi), r2, ok=True)


def error_floor(trace, f_star: Optional[float] = None) -> dict:
    """Smallest gap reached, plus whether the series actually plateaued.

    The floor is unreliable when the final 20% of the series still improves
    on everything before it by more than 5%: the run was stopped while the
    gap was still descending.
    """
    gaps = [g for _, g in trace_gaps(trace, f_star)]
    if not gaps:
        return {"floor": math.nan, "reliable": False}
    floor = min(gaps)
    split = max(1, int(0.8 * len(gaps)))
    head_min = min(gaps[:split])
    tail_min = min(gaps[split:]) if gaps[split:] else head_min
    reliable = tail_min >= 0.95 * head_min
    return {"floor": floor, "reliable": reliable}


def _run_cell(cfg: ExperimentConfig, p, delta_u, delta_pu) -> dict:
    noise = None
    if delta_u > 0:
        noise = NoiseSpec(delta1_bar=delta_u, delta2_bar=0.0,
                          diameter=cfg.noise_diameter, mode=cfg.noise_mode)
    problem = make_problem(cfg.problem_id, noise=noise)
    solver_cfg = SolverConfig(epsilon=cfg.epsilon, L0=cfg.L0, p=p,
                              delta_pu=delta_pu, max_outer=cfg.max_outer,
                              max_inner=cfg.max_inner, D=cfg.D)
    t0 = time.perf_counter()
    result = run(problem, solver_cfg)
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    f_star = problem.f_star
    trace = result.trace
    fit = fit_rate(trace, f_star=f_star)
    gaps = trace_gaps(trace, f_star)
    final_gap = gaps[-1][1] if gaps else math.nan
    nu = problem.oracle.smoothness.nu if problem.oracle.smoothness else math.nan
    calls = result.state.oracle_calls + result.state.init_oracle_calls
    if not oracle_call_identity(trace):
        raise RuntimeError("trace violates the oracle-call count identity")
    return {
        "problem_id": cfg.problem_id, "p": p, "nu": nu,
        "delta_u": delta_u, "delta_pu": delta_pu,
        "final_gap": final_gap, "slope": fit.slope,
        "r_squared": fit.r_squared, "oracle_calls": calls,
        "wall_ms": wall_ms, "trace": trace,
    }


def _fmt(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else format(value, ".17g")
    return str(value)


def write_summary(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


def run_experiment(config_path) -> int:
    """Execute every sweep cell of a config; 0 unless all cells fail."""
    cfg = load_config(config_path)
    out_dir = resolve_output_dir(cfg)
    os.makedirs(out_dir, exist_ok=True)
    rows, failures = [], []
    for p, delta_u, delta_pu in cfg.cells():
        tag = _cell_tag(cfg.problem_id, p, delta_u, delta_pu)
        try:
            row = _run_cell(cfg, p, delta_u, delta_pu)
        except Exception as exc:  # per-cell failure is recorded, not fatal
            failures.append((tag, exc))
            print(f"cell {tag}: FAILED ({exc})", file=sys.stderr)
            continue
        trace_to_csv(row.pop("trace"), os.path.join(out_dir, tag + ".csv"))
        rows.append(row)
        print(f"cell {tag}: gap={row['final_gap']:.3e} "
              f"slope={row['slope']:.3f} calls={row['oracle_calls']}")
    write_summary(rows, os.path.join(out_dir, "summary.csv"))
    emit_plotdata(rows, out_dir)
    if failures and not rows:
        return 1
    return 0


def emit_plotdata(rows, out_dir) -> None:
    """Plot-ready CSVs: gap series per cell, floor vs p, calls per iteration."""
    gap_path = os.path.join(out_dir, "plot_gap_vs_k.csv")
    floor_path = os.path.join(out_dir, "plot_floor_vs_p.csv")
    calls_path = os.path.join(out_dir, "plot_calls_per_iter.csv")

    with open(gap_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell", "k", "gap"])
        for row in rows:
            tag = _cell_tag(row["problem_id"], row["p"], row["delta_u"],
                            row["delta_pu"])
            trace = _cell_trace(out_dir, tag)
            if trace is None:
                continue
            for k, gap in trace_gaps(trace):
                writer.writerow([tag, k, _fmt(gap)])

    with open(floor_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "delta_u", "floor"])
        for row in rows:
            tag = _cell_tag(row["problem_id"], row["p"], row["delta_u"],
                            row["delta_pu"])
            trace = _cell_trace(out_dir, tag)
            if trace is None:
                continue
            fl = error_floor(trace)
            writer.writerow([_fmt(row["p"]), _fmt(row["delta_u"]),
                             _fmt(fl["floor"])])

    with open(calls_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell", "k", "calls_per_iteration"])
        for row in rows:
            tag = _cell_tag(row["problem_id"], row["p"], row["delta_u"],
                            row["delta_pu"])
            trace = _cell_trace(out_dir, tag)
            if trace is None:
                continue
            for rec in trace:
                if rec.k > 0:
                    writer.writerow([tag, rec.k,
                                     _fmt(rec.oracle_calls_cum / rec.k)])


def _cell_trace(out_dir, tag):
    path = os.path.join(out_dir, tag + ".csv")
    return trace_from_csv(path) if os.path.exists(path) else None


def report(summary_path) -> int:
    with open(summary_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        print("summary is empty")
        return 0
    widths = {c: max(len(c), *(len(r[c][:12]) for r in rows))
              for c in SUMMARY_COLUMNS}
    print("  ".join(c.ljust(widths[c]) for c in SUMMARY_COLUMNS))
    for r in rows:
        print("  ".join(r[c][:12].ljust(widths[c]) for c in SUMMARY_COLUMNS))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unigrad-bench",
        description="benchmark harness for the adaptive intermediate "
                    "gradient solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config")

    p_fit = sub.add_parser("fit", help="fit a convergence slope to a trace")
    p_fit.add_argument("trace")
    p_fit.add_argument("--window", default=None,
                       help="iteration window a,b (default: auto)")
    p_fit.add_argument("--fstar", type=float, default=None,
                       help="analytic optimal value (default: trace minimum)")

    p_rep = sub.add_parser("report", help="print a summary CSV as a table")
    p_rep.add_argument("summary")

    args = parser.parse_args(argv)
    if args.command == "run":
        return run_experiment(args.config)
    if args.command == "fit":
        trace = trace_from_csv(args.trace)
        window = None
        if args.window:
            a, b = args.window.split(",")
            window = (int(a), int(b))
        fit = fit_rate(trace, window=window, f_star=args.fstar)
        if not fit.ok:
            print("fit unavailable: fewer than 5 usable points in window")
            return 1
        print(f"slope={fit.slope:.4f} r_squared={fit.r_squared:.4f} "
              f"window=[{fit.window[0]},{fit.window[1]}]")
        return 0
    return report(args.summary)


if __name__ == "__main__":
    sys.exit(main())
