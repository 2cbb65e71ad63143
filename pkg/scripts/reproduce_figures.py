"""Regenerate the three figure sweeps.

Writes `data/figure{1,2,3}.csv` and a gnuplot script next to each. The full
grids take a while with the default optimizer budget; pass `--quick` for a
coarse pass (11 points, 8 restarts) when checking that everything runs.

    python scripts/reproduce_figures.py
    python scripts/reproduce_figures.py --quick --jobs 4
"""

import argparse
import logging
import pathlib
import sys
import time

# ensure project root is on sys.path so `import src` works
ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.accinfo import OptimizerConfig  # noqa: E402
from src.cli import default_jobs  # noqa: E402
from src.sweeps import SweepSpec, plot_script, sweep_rows, write_csv  # noqa: E402

DATA_DIR = ROOT / "data"


def main() -> int:
    parser = argparse.ArgumentParser(description="Write the figure CSVs and gnuplot scripts under data/")
    parser.add_argument("--quick", action="store_true", help="11 grid points and 8 restarts")
    parser.add_argument("--jobs", type=int, default=default_jobs())
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    steps = 11 if args.quick else 101
    optimizer = OptimizerConfig(restarts=8 if args.quick else 32, seed=args.seed)
    DATA_DIR.mkdir(exist_ok=True)

    violations = 0
    for family in ("figure1", "figure2", "figure3"):
        started = time.time()
        spec = SweepSpec(family=family, grid_steps=steps, optimizer=optimizer, n_jobs=args.jobs)
        rows = sweep_rows(spec)
        csv_path = DATA_DIR / f"{family}.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            write_csv(rows, f)
        gp_path = DATA_DIR / f"{family}.gp"
        gp_path.write_text(plot_script(str(csv_path), family=family), encoding="utf-8")
        bad = sum(1 for row in rows if not row.report.sandwich_ok)
        violations += bad
        print(f"{family}: {len(rows)} rows -> {csv_path} ({time.time() - started:.1f}s, {bad} violations)")

    return 3 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
