"""Command-line front-end.

Subcommands:
  avg-trials      analytic expected trial counts per parallel group size
  simulate-rus    Monte Carlo of parallel repeat-until-success rotations
  compile-trotter compile one Trotter step to a patch timeline + summary
  compare-serial  serial vs parallel clock counts per lattice size
  estimate        end-to-end phase-estimation resource report
  qcels-demo      multi-level phase estimation success-rate demo

Exit codes: 0 success, 1 validation error, 2 infeasible model.
All outputs are written atomically (temp file + rename); the same argv and
seed always produce byte-identical files.  The STAR_THREADS environment
variable overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import tempfile
from dataclasses import replace

from .estimator import EstimatorConfig, InfeasibleModel, build_report, parse_config
from .hubbard import OrderingError
from .injection import SHIPPED_CONFIGS, AngleCapError, load_p_pass_table
from .qcels import SyntheticSpectrum, multilevel_qcels, wrap_phase
from .rus import expected_trials, simulate_parallel_rus
from .trotter import compile_step, rough_t_rus, serial_clocks, trotter_clocks


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _rows_text(header: list[str], rows: list[list], fmt: str) -> str:
    """Render tabular data as csv, json (list of objects), or aligned text."""
    if fmt == "json":
        return (
            json.dumps([dict(zip(header, row)) for row in rows], indent=1) + "\n"
        )
    str_rows = [[str(c) for c in row] for row in rows]
    if fmt == "csv":
        lines = [",".join(header)] + [",".join(r) for r in str_rows]
        return "\n".join(lines) + "\n"
    widths = [
        max(len(header[i]), *(len(r[i]) for r in str_rows)) if str_rows else len(header[i])
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for r in str_rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def _obj_text(obj: dict, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(f"{k}: {v}" for k, v in obj.items()) + "\n"
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _injection_config(args):
    cfg = SHIPPED_CONFIGS[args.d]
    updates: dict = {}
    if args.p_pass is not None:
        updates["p_pass"] = args.p_pass
    elif args.p_pass_table is not None:
        updates["p_pass"] = load_p_pass_table(args.p_pass_table)
    if args.attempts is not None:
        updates["attempts_per_clock"] = args.attempts
    return replace(cfg, **updates) if updates else cfg


def cmd_avg_trials(args) -> int:
    rows = [[m, f"{expected_trials(m):.6f}"] for m in range(1, args.m_max + 1)]
    _emit(args, _rows_text(["m", "avg_trials"], rows, args.format or "csv"))
    return 0


def cmd_simulate_rus(args) -> int:
    cfg = _injection_config(args)
    stats = simulate_parallel_rus(
        args.m,
        args.basis,
        args.theta,
        cfg,
        mode=args.mode,
        runs=args.runs,
        seed=args.seed,
        threads=args.threads,
    )
    if args.hist:
        rows = [[clock, count] for clock, count in stats.histogram().items()]
        write_atomic(args.hist, _rows_text(["clock", "count"], rows, "csv"))
    summary = {
        "mean": stats.mean,
        "p50": stats.percentile(50),
        "p95": stats.percentile(95),
        "max": stats.max,
        "runs": stats.runs,
        "seed": stats.seed,
    }
    _emit(args, _obj_text(summary, args.format or "json"))
    return 0


def cmd_compile_trotter(args) -> int:
    schedule = compile_step(args.n, dt=args.dt, mode=args.mode)
    if args.timeline:
        tmp = args.timeline + ".tmp"
        schedule.timeline.export_jsonl(tmp)
        os.replace(tmp, args.timeline)
    groups = sorted(schedule.rus_group_multiset().items())
    summary = {
        "rus_groups": [
            {"m": m, "basis": basis, "count": count} for (m, basis), count in groups
        ],
        "fixed_clocks": schedule.fixed_clocks,
        "L": schedule.fswaps.depth,
        "formula_clocks": trotter_clocks(args.n, rough_t_rus),
    }
    _emit(args, _obj_text(summary, args.format or "json"))
    return 0


def cmd_compare_serial(args) -> int:
    rows = []
    for n in args.n:
        serial = serial_clocks(n)
        parallel = trotter_clocks(n, rough_t_rus)
        reduction = 100.0 * (1.0 - parallel / serial)
        rows.append([n, f"{serial:.0f}", f"{parallel:.3f}", f"{reduction:.2f}"])
    header = ["n", "serial_clocks", "parallel_clocks", "reduction_pct"]
    _emit(args, _rows_text(header, rows, args.format or "csv"))
    return 0


def cmd_estimate(args) -> int:
    cfg = EstimatorConfig()
    if args.config:
        with open(args.config) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"config is not valid JSON: {exc}") from None
        cfg = parse_config(obj)
    cfg.n = args.n
    report = build_report(args.n, cfg, calibrate_nmax=args.calibrate_nmax)
    _emit(args, report.to_json() + "\n")
    return 0


def cmd_qcels_demo(args) -> int:
    if args.spectrum:
        with open(args.spectrum) as fh:
            obj = json.load(fh)
        spectrum = SyntheticSpectrum(tuple(obj["phases"]), tuple(obj["weights"]))
    else:
        spectrum = SyntheticSpectrum(
            (-0.5, 0.9, 1.8, 2.6, -2.8), (0.8, 0.05, 0.05, 0.05, 0.05)
        )
    target = spectrum.dominant
    errors = []
    for trial in range(args.trials):
        est = multilevel_qcels(
            spectrum,
            args.eps,
            delta=args.delta,
            n_pairs=args.pairs,
            n_samples=args.samples,
            seed=args.seed * 1_000_003 + trial,
        )
        errors.append(abs(wrap_phase(est - target)))
    summary = {
        "success_rate": sum(e < args.eps for e in errors) / len(errors),
        "median_error": statistics.median(errors),
        "params": {
            "eps": args.eps,
            "delta": args.delta,
            "pairs": args.pairs,
            "samples": args.samples,
            "trials": args.trials,
            "seed": args.seed,
        },
    }
    _emit(args, _obj_text(summary, args.format or "json"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starsched",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument(
            "--format",
            choices=("json", "csv", "text"),
            default=None,
            help="output format (default depends on subcommand)",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="Monte Carlo worker threads (default 1; STAR_THREADS overrides)",
        )

    p = sub.add_parser("avg-trials", help="expected trial counts per group size")
    common(p)
    p.add_argument("--m-max", type=int, default=64, help="largest group size")
    p.set_defaults(func=cmd_avg_trials)

    p = sub.add_parser("simulate-rus", help="parallel rotation Monte Carlo")
    common(p)
    p.add_argument("--m", type=int, default=32, help="parallel rotation count")
    p.add_argument("--basis", choices=("Z", "ZZ"), default="Z")
    p.add_argument("--theta", type=float, default=1e-8, help="target angle")
    p.add_argument(
        "--d", type=int, choices=sorted(SHIPPED_CONFIGS), default=9,
        help="code distance selecting the shipped injection configuration",
    )
    p.add_argument("--mode", choices=("naive", "adaptive"), default="adaptive")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--p-pass", type=float, default=None, help="constant pass rate")
    p.add_argument("--p-pass-table", default=None, help="JSON pass-rate table file")
    p.add_argument("--attempts", type=int, default=None, help="attempts per clock")
    p.add_argument("--hist", default=None, help="write histogram CSV to this path")
    p.set_defaults(func=cmd_simulate_rus)

    p = sub.add_parser("compile-trotter", help="compile one Trotter step")
    common(p)
    p.add_argument("--n", type=int, default=4, help="lattice side length")
    p.add_argument("--dt", type=float, default=0.01, help="Trotter time step")
    p.add_argument("--mode", choices=("plain", "controlled"), default="plain")
    p.add_argument("--timeline", default=None, help="write timeline JSON-lines here")
    p.set_defaults(func=cmd_compile_trotter)

    p = sub.add_parser("compare-serial", help="serial vs parallel clocks")
    common(p)
    p.add_argument(
        "--n", type=int, nargs="+", default=[4, 6, 8, 10], help="lattice sizes"
    )
    p.set_defaults(func=cmd_compare_serial)

    p = sub.add_parser("estimate", help="phase-estimation resource report")
    common(p)
    p.add_argument("--n", type=int, default=4, help="lattice side length")
    p.add_argument("--config", default=None, help="config JSON file")
    p.add_argument(
        "--calibrate-nmax",
        type=int,
        default=None,
        help="largest-circuit step count used to back out the error norm",
    )
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("qcels-demo", help="phase-estimation success-rate demo")
    common(p)
    p.add_argument("--spectrum", default=None, help="JSON file {phases, weights}")
    p.add_argument("--eps", type=float, default=0.01, help="target accuracy")
    p.add_argument("--delta", type=float, default=0.06)
    p.add_argument("--pairs", type=int, default=5, help="data points per level")
    p.add_argument("--samples", type=int, default=100, help="shots parameter")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_qcels_demo)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env_threads = os.environ.get("STAR_THREADS")
    if env_threads:
        try:
            args.threads = int(env_threads)
        except ValueError:
            print(f"error: STAR_THREADS must be an integer, got {env_threads!r}",
                  file=sys.stderr)
            return 1
    try:
        return args.func(args)
    except InfeasibleModel as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, OrderingError, AngleCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
