"""Command-line front end: single-ensemble reports, figure sweeps and the fuzz harness.

    python -m src.cli compute ensemble.json
    python -m src.cli sweep --family figure1 --steps 101 --out data/figure1.csv
    python -m src.cli fuzz --count 1000 --dim 2

Exit codes: 0 ok, 2 input error, 3 sandwich or property violation.
"""
import argparse
import io
import json
import logging
import os
import sys
from typing import List, Optional

from .accinfo import OptimizerConfig
from .bounds import build_report
from .ensembles import dump_ensemble, ensemble_from_dict, load_ensemble
from .errors import AccInfoError, EnsembleFormatError
from .properties import FuzzSpec, make_case, run_fuzz
from .sweeps import FAMILIES, SweepRow, SweepSpec, plot_script, sweep_rows, write_csv

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3
JOBS_ENV = "ACCINFO_N_JOBS"


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    try:
        jobs = int(raw) if raw else 1
    except ValueError:
        LOGGER.warning("ignoring %s=%r, not an integer", JOBS_ENV, raw)
        return 1
    return jobs or 1


def _read_ensemble(path: str):
    if path == "-":
        try:
            data = json.load(sys.stdin)
        except json.JSONDecodeError as exc:
            raise EnsembleFormatError(f"stdin: not valid JSON ({exc})") from exc
        return ensemble_from_dict(data)
    return load_ensemble(path)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        LOGGER.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _optimizer(args, n_jobs: int = 1) -> OptimizerConfig:
    return OptimizerConfig(
        outcomes=args.outcomes,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        seed=args.seed,
        n_jobs=n_jobs,
    )


def cmd_compute(args) -> int:
    e = _read_ensemble(args.input)
    report = build_report(e, _optimizer(args, n_jobs=args.jobs))
    if args.format == "csv":
        buf = io.StringIO()
        write_csv([SweepRow(param=e.p, report=report)], buf)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK if report.sandwich_ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    ensemble = _read_ensemble(args.input) if args.input else None
    spec = SweepSpec(
        family=args.family,
        grid_start=args.start,
        grid_end=args.end,
        grid_steps=args.steps,
        optimizer=_optimizer(args),
        ensemble=ensemble,
        n_jobs=args.jobs,
    )
    rows = sweep_rows(spec)
    buf = io.StringIO()
    write_csv(rows, buf)
    _emit(buf.getvalue(), args.out)
    if args.plot_script:
        _emit(plot_script(args.out or "sweep.csv", family=args.family), args.plot_script)
    failed = [row.param for row in rows if not row.report.sandwich_ok]
    if failed:
        LOGGER.warning("%d of %d rows violate the sandwich", len(failed), len(rows))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_fuzz(args) -> int:
    spec = FuzzSpec(
        count=args.count,
        dim=args.dim,
        ranks=tuple(args.ranks) if args.ranks else None,
        seed=args.seed,
        optimizer=_optimizer(args),
        identical=args.identical,
        chi_offset=args.inject_chi_offset,
        n_jobs=args.jobs,
    )
    summary = run_fuzz(spec)
    _emit(json.dumps(summary.to_dict(), indent=2) + "\n", args.out)
    failure = summary.first_failure()
    if failure is None:
        return EXIT_OK
    name, index, margin = failure
    if args.dump:
        case = make_case(spec, index)
        dump_ensemble(
            case.ensemble,
            args.dump,
            extra={"property": name, "margin": margin, "case": index, "seed": case.seed},
        )
        LOGGER.warning("counterexample for %s (case %d) written to %s", name, index, args.dump)
    return EXIT_VIOLATION


def _add_optimizer_flags(p: argparse.ArgumentParser, restarts: int) -> None:
    p.add_argument("--seed", type=int, default=0, help="Base seed for random restarts and ensembles")
    p.add_argument("--restarts", type=int, default=restarts, help="Random optimizer restarts")
    p.add_argument("--outcomes", type=int, default=None, help="POVM outcomes (default d^2)")
    p.add_argument("--max-iterations", type=int, default=2000, help="Coordinate-descent sweeps per restart")
    p.add_argument("--jobs", type=int, default=default_jobs(), help=f"joblib workers (default ${JOBS_ENV} or 1)")
    p.add_argument("--out", help="Output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("accinfo", description="Bounds on accessible information of binary ensembles")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="cmd")

    p_compute = sub.add_parser("compute", help="Full bound report for one ensemble JSON")
    p_compute.add_argument("input", help="Ensemble JSON file, '-' for stdin")
    p_compute.add_argument("--format", choices=("json", "csv"), default="json")
    _add_optimizer_flags(p_compute, restarts=32)
    p_compute.set_defaults(func=cmd_compute)

    p_sweep = sub.add_parser("sweep", help="Figure sweep as CSV")
    p_sweep.add_argument("--family", choices=FAMILIES, default="figure1")
    p_sweep.add_argument("--start", type=float, default=None, help="Grid start (family default)")
    p_sweep.add_argument("--end", type=float, default=None, help="Grid end (family default)")
    p_sweep.add_argument("--steps", type=int, default=101, help="Grid points")
    p_sweep.add_argument("--input", help="Ensemble JSON for the custom family")
    p_sweep.add_argument("--plot-script", help="Also write a gnuplot script here")
    _add_optimizer_flags(p_sweep, restarts=32)
    p_sweep.set_defaults(func=cmd_sweep)

    p_fuzz = sub.add_parser("fuzz", help="Check every registered property on random ensembles")
    p_fuzz.add_argument("--count", type=int, default=100)
    p_fuzz.add_argument("--dim", type=int, default=2)
    p_fuzz.add_argument("--ranks", type=int, nargs=2, metavar=("R0", "R1"), help="Fixed ranks (default random)")
    p_fuzz.add_argument("--identical", action="store_true", help="Force rho1 = rho0")
    p_fuzz.add_argument("--inject-chi-offset", type=float, default=0.0, help="Add to chi in every report")
    p_fuzz.add_argument("--dump", help="Write the worst counterexample as ensemble JSON")
    _add_optimizer_flags(p_fuzz, restarts=4)
    p_fuzz.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if not hasattr(args, "func") or args.func is None:
        parser.print_help()
        return EXIT_INPUT
    try:
        return args.func(args)
    except (AccInfoError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
