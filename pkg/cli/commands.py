"""
Plate Swarm Command Line
========================
simulate | verify | plot | sweep

Exit codes: 0 success, 1 configuration error, 2 divergence, 3 verification failure.
The default output directory is ./out, or $PLATE_SWARM_OUT (a .env file is read).
"""

import argparse
import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from colorama import Fore, Style, init
from dotenv import load_dotenv
from pydantic import ValidationError

from cli.csv_io import write_trajectory_csv, write_controls_csv, write_summary, read_trajectory_csv
from cli.plots import plot_figures, FIGURES
from models.errors import PlateSwarmError, ScenarioError, StepDiverged, TrajectoryFileError
from models.gains import Gains
from models.scenario import Scenario, IntegratorConfig, Mode, load_scenario
from sim.runner import simulate
from verify.boundary_layer import boundary_layer_monitor
from verify.gains import gain_condition_check
from verify.lyapunov import attitude_bounds_from_initial
from verify.suites import SuiteConfig, run_suites

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_VERIFY = 3

SUITE_CHOICES = ["algebra", "conservation", "pfl", "lyapunov", "gains", "boundary", "all"]
CONVERGENCE_LIMITS = {"r_b_norm": 1e-2, "eta_norm": 1e-3, "height_abs": 1e-2, "Omega_p_norm": 1e-3}


def default_out_dir() -> str:
    return os.getenv("PLATE_SWARM_OUT", "./out")


# ═══════════════════════════════════════════════════════
#  HELPERS
# ═══════════════════════════════════════════════════════

def _fail(message: str, code: int) -> int:
    print(f"{Fore.RED}❌ {message}")
    return code


def with_integrator(sc: Scenario, **changes) -> Scenario:
    """Scenario with re-validated integrator overrides (None values ignored)."""
    changes = {k: v for k, v in changes.items() if v is not None}
    if not changes:
        return sc
    try:
        cfg = IntegratorConfig(**{**sc.integrator.model_dump(), **changes})
    except ValidationError as e:
        err = e.errors()[0]
        raise ScenarioError(err["msg"], "integrator." + ".".join(str(p) for p in err["loc"]))
    return sc.with_(integrator=cfg)


def with_parameter(sc: Scenario, param: str, value: float) -> Scenario:
    """Override one gain (any Gains field) or the step size."""
    if param == "dt":
        return with_integrator(sc, dt=value)
    if param not in Gains.model_fields:
        raise ScenarioError(f"unknown sweep parameter '{param}'", "--param")
    try:
        return sc.with_(gains=sc.gains.with_(**{param: value}))
    except ValidationError as e:
        raise ScenarioError(e.errors()[0]["msg"], f"gains.{param}")


def converged(metrics: dict) -> bool:
    return all(metrics[k] < limit for k, limit in CONVERGENCE_LIMITS.items())


def report_certificate(sc: Scenario) -> None:
    g = sc.gains
    print(f"[Control] k1..k8 = {g.k1:g}, {g.k2:g}, {g.k3:g}, {g.k4:g}, {g.k5:g}, {g.k6:g}, {g.k7:g}, {g.k8:g}; "
          f"kR = {g.kR:g}, kΩ = {g.kOmega:g}, ε = {g.eps:g}")
    C1, C2 = attitude_bounds_from_initial(sc.state0, g)
    cert = gain_condition_check(g, g.c0, g.c1, g.c2, C1, C2)
    if not cert.accepted:
        print(f"{Fore.YELLOW}[Verify] ⚠️ gain certificate rejected: {cert.reason}")


def _status(error: Optional[Exception]) -> str:
    if error is None:
        return "ok"
    return "diverged" if isinstance(error, StepDiverged) else "failed"


def run_to_dir(sc: Scenario, out: Path, verbose: bool = False):
    """
    Simulate and write trajectory.csv, controls.csv and summary.json.

    Returns (summary, traj, error); error is the PlateSwarmError that stopped
    the run early, whose partial trajectory is still written. A failure before
    the first sample is re-raised.
    """
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    error = None
    try:
        traj = simulate(sc, verbose=verbose)
    except PlateSwarmError as e:
        traj = getattr(e, "trajectory", None)
        if traj is None or len(traj) == 0:
            raise
        error = e
    wall = time.perf_counter() - started

    matrix = write_trajectory_csv(traj, out / "trajectory.csv")
    write_controls_csv(traj, out / "controls.csv")
    meta = {
        "scenario": sc.name,
        "mode": Mode(sc.mode).value,
        "dt": sc.integrator.dt,
        "duration": sc.integrator.duration,
        "decimation": sc.integrator.decimation,
        "gains": sc.gains.model_dump(),
        "status": _status(error),
        "diverged_at": traj.diverged_at,
        "error": None if error is None else str(error),
        "samples": len(traj),
        "wall_time_s": round(wall, 3),
    }
    summary = write_summary(out / "summary.json", matrix, meta)
    return summary, traj, error


def print_metrics(metrics: dict) -> None:
    for key, value in metrics.items():
        shown = ", ".join(f"{v:.4e}" for v in value) if isinstance(value, list) else f"{value:.4e}"
        print(f"   {key:<14} {shown}")


# ═══════════════════════════════════════════════════════
#  COMMANDS
# ═══════════════════════════════════════════════════════

def cmd_simulate(args) -> int:
    try:
        sc = load_scenario(args.scenario)
        sc = with_integrator(sc, dt=args.dt, duration=args.duration)
        if args.mode:
            sc = sc.with_(mode=Mode(args.mode))
    except PlateSwarmError as e:
        return _fail(str(e), EXIT_CONFIG)

    report_certificate(sc)
    out = Path(args.out)
    try:
        summary, _, error = run_to_dir(sc, out, verbose=True)
    except PlateSwarmError as e:
        return _fail(f"[Sim] {e}", EXIT_DIVERGED)

    print(f"[Sim] Wrote {out / 'trajectory.csv'}, {out / 'summary.json'}")
    print_metrics(summary["metrics"])
    if error is not None:
        return _fail(f"[Sim] {error}", EXIT_DIVERGED)
    print(f"{Fore.GREEN}✅ [Sim] {sc.name} finished in {summary['wall_time_s']} s")
    return EXIT_OK


def print_results_table(results) -> None:
    width = max((len(r.check) for r in results), default=10)
    print(f"\n{Style.BRIGHT}{'SUITE':<13} {'CHECK':<{width}}  RESULT  DETAIL")
    for r in results:
        color, mark = (Fore.GREEN, "PASS") if r.passed else (Fore.RED, "FAIL")
        print(f"{r.suite:<13} {r.check:<{width}}  {color}{mark:<6}{Style.RESET_ALL}  {r.detail}")


def cmd_verify(args) -> int:
    scenario = None
    try:
        if args.scenario:
            scenario = load_scenario(args.scenario)
    except PlateSwarmError as e:
        return _fail(str(e), EXIT_CONFIG)

    cfg = SuiteConfig(seed=args.seed, scenario=scenario)
    if args.quick:
        cfg = SuiteConfig(seed=args.seed, scenario=scenario, n_random=100, n_alloc=1000,
                          n_gain_sets=20, n_oracle_samples=20_000, passive_duration=2.0)
    print(f"[Verify] ▶ suites {', '.join(args.suite)} (seed {args.seed})")
    results = run_suites(args.suite, cfg)
    print_results_table(results)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    passed = all(r.passed for r in results)
    report = {"seed": args.seed, "suites": args.suite, "passed": passed,
              "results": [r.to_dict() for r in results]}
    (out / "verify.json").write_text(json.dumps(report, indent=2), encoding="utf-8")
    print(f"[Verify] Wrote {out / 'verify.json'}")

    if passed:
        print(f"{Fore.GREEN}✅ [Verify] {len(results)} checks passed")
        return EXIT_OK
    failed = [r for r in results if not r.passed]
    first = failed[0]
    print(f"{Fore.RED}❌ [Verify] {len(failed)} of {len(results)} checks failed; first: {first.suite} / {first.check}")
    if first.counterexample is not None:
        print(json.dumps(first.counterexample, indent=2))
    return EXIT_VERIFY


def cmd_plot(args) -> int:
    try:
        _, matrix = read_trajectory_csv(args.traj)
    except TrajectoryFileError as e:
        return _fail(f"[Plot] {e}", EXIT_CONFIG)
    plot_figures(matrix, args.figs, args.out)
    return EXIT_OK


SWEEP_FIELDS = ["value", "status", "converged", "r_b_norm", "eta_norm", "height_abs", "Omega_p_norm",
                "v_xy_spread", "rate_eR_1", "rate_eR_2", "rate_eR_3", "rate_eR_max", "error"]


def sweep_one(sc: Scenario, param: str, value: float, out: Path) -> dict:
    row = {k: "" for k in SWEEP_FIELDS}
    row["value"] = value
    try:
        run = with_parameter(sc, param, value).with_(name=f"{sc.name}-{param}={value:g}")
        summary, traj, error = run_to_dir(run, out / f"{param}={value:g}")
    except PlateSwarmError as e:
        row.update(status="failed", converged=False, error=str(e))
        print(f"{Fore.RED}[Sweep] ❌ {param}={value:g}: {e}")
        return row

    metrics = summary["metrics"]
    row.update({k: metrics[k] for k in ("r_b_norm", "eta_norm", "height_abs", "Omega_p_norm", "v_xy_spread")})
    row["status"] = _status(error)
    row["converged"] = error is None and converged(metrics)
    row["error"] = "" if error is None else str(error)
    if traj.has_trace and len(traj) >= 3:
        row.update(boundary_layer_monitor(traj).rates())
    mark = "✅" if row["converged"] else "⚠️"
    print(f"[Sweep] {mark} {param}={value:g}: {row['status']}, ‖r_b(T)‖ = {metrics['r_b_norm']:.3e}")
    return row


def cmd_sweep(args) -> int:
    try:
        sc = load_scenario(args.scenario)
        sc = with_integrator(sc, duration=args.duration)
        for v in args.values:
            with_parameter(sc, args.param, v)
    except PlateSwarmError as e:
        return _fail(str(e), EXIT_CONFIG)

    out = Path(args.out) / "sweep"
    out.mkdir(parents=True, exist_ok=True)
    print(f"[Sweep] ▶ {args.param} ∈ {{{', '.join(f'{v:g}' for v in args.values)}}}")
    with ThreadPoolExecutor(max_workers=args.workers or len(args.values)) as pool:
        rows = list(pool.map(lambda v: sweep_one(sc, args.param, v, out), args.values))

    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=SWEEP_FIELDS)
        w.writeheader()
        w.writerows(rows)
    print(f"[Sweep] Wrote {out / 'sweep.csv'}")
    if any(r["status"] == "ok" for r in rows):
        return EXIT_OK
    return _fail("[Sweep] every run failed", EXIT_DIVERGED)


# ═══════════════════════════════════════════════════════
#  PARSER
# ═══════════════════════════════════════════════════════

def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plate_swarm",
                                     description="Plate + ball carried by three tethered quadrotors")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Run a scenario and write trajectory.csv, controls.csv, summary.json")
    sim.add_argument("--scenario", required=True, help="Scenario JSON file")
    sim.add_argument("--out", default=default_out_dir(), help="Output directory")
    sim.add_argument("--dt", type=float, default=None, help="Override the step size (s)")
    sim.add_argument("--duration", type=float, default=None, help="Override the simulated time (s)")
    sim.add_argument("--mode", choices=[m.value for m in Mode], default=None, help="Override the mode")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="Run verification suites and write verify.json")
    ver.add_argument("--suite", nargs="+", choices=SUITE_CHOICES, default=["all"])
    ver.add_argument("--scenario", default=None, help="Closed-loop scenario checked against the acceptance metrics")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--quick", action="store_true", help="Smaller sample counts and shorter runs")
    ver.add_argument("--out", default=default_out_dir())
    ver.set_defaults(func=cmd_verify)

    plot = sub.add_parser("plot", help="Draw SVG figures from a trajectory CSV")
    plot.add_argument("--traj", required=True, help="trajectory.csv")
    plot.add_argument("--out", default=default_out_dir())
    plot.add_argument("--figs", nargs="+", choices=list(FIGURES) + ["all"], default=["all"])
    plot.set_defaults(func=cmd_plot)

    sweep = sub.add_parser("sweep", help="Run one scenario over values of a single parameter")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--param", required=True, help="A gain name (eps, k4, ...) or dt")
    sweep.add_argument("--values", required=True, type=_float_list, help="e.g. '0.4,0.2,0.1'")
    sweep.add_argument("--duration", type=float, default=None)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--out", default=default_out_dir())
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    init(autoreset=True)
    args = build_parser().parse_args(argv)
    return args.func(args)
