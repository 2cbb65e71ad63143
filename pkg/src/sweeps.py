"""Parameter sweeps behind the figures: one BoundReport per grid point,
written as CSV with a companion gnuplot script.

Families:
    figure1  two pure qubits with overlap 1/2, sweeping the prior p in [0, 1]
    figure2  equal priors, sweeping the angle theta in [0, pi/2]
    figure3  the mixed qutrit ensemble, sweeping p in [0, 1]
    custom   a loaded ensemble, sweeping its prior
"""

from dataclasses import dataclass, field
from typing import IO, List, Optional, Tuple
import csv
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from .accinfo import OptimizerConfig
from .bounds import BoundReport, build_report
from .ensembles import BinaryEnsemble, figure3_ensemble, pure_pair
from .errors import ConfigError

LOGGER = logging.getLogger(__name__)

CSV_HEADER = (
    "param,chi,h_p,fidelity_b,subentropy_q,t1,t2,t_max,lb1,lb2,"
    "i_fid,i_helstrom,i_pgm,i_acc_est,sandwich_ok"
)
CSV_COMMENT = (
    "# i_helstrom is the Helstrom-basis information, used in place of the "
    "Fuchs-Caves measurement curve"
)
FAMILIES = ("figure1", "figure2", "figure3", "custom")
# cos(theta) = 1/2
FIGURE1_THETA = math.pi / 3

_DOMAINS = {
    "figure1": (0.0, 1.0),
    "figure2": (0.0, math.pi / 2),
    "figure3": (0.0, 1.0),
    "custom": (0.0, 1.0),
}


@dataclass(frozen=True)
class SweepSpec:
    family: str = "figure1"
    grid_start: Optional[float] = None
    grid_end: Optional[float] = None
    grid_steps: int = 101
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    ensemble: Optional[BinaryEnsemble] = None
    n_jobs: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.grid_steps < 2:
            raise ConfigError(f"grid_steps must be >= 2, got {self.grid_steps}")
        if self.family == "custom" and self.ensemble is None:
            raise ConfigError("the custom family needs an ensemble")
        lo, hi = _DOMAINS[self.family]
        start, end = self.bounds
        if not (lo - 1e-12 <= start <= hi + 1e-12 and lo - 1e-12 <= end <= hi + 1e-12):
            raise ConfigError(f"range [{start}, {end}] outside [{lo}, {hi}] for {self.family}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be non-zero")

    @property
    def bounds(self) -> Tuple[float, float]:
        lo, hi = _DOMAINS[self.family]
        start = lo if self.grid_start is None else self.grid_start
        end = hi if self.grid_end is None else self.grid_end
        return start, end

    def grid(self) -> np.ndarray:
        lo, hi = _DOMAINS[self.family]
        return np.clip(np.linspace(*self.bounds, self.grid_steps), lo, hi)


@dataclass(frozen=True)
class SweepRow:
    param: float
    report: BoundReport


def ensemble_at(spec: SweepSpec, param: float) -> BinaryEnsemble:
    if spec.family == "figure1":
        return pure_pair(FIGURE1_THETA, param)
    if spec.family == "figure2":
        return pure_pair(param, 0.5)
    if spec.family == "figure3":
        return figure3_ensemble(param)
    return spec.ensemble.with_prior(param)


def _row(spec: SweepSpec, param: float) -> SweepRow:
    return SweepRow(param=param, report=build_report(ensemble_at(spec, param), spec.optimizer))


def sweep_rows(spec: SweepSpec) -> List[SweepRow]:
    """One row per grid point, in grid order whatever ``n_jobs`` is."""
    grid = [float(x) for x in spec.grid()]
    LOGGER.debug("sweeping %s over %d points", spec.family, len(grid))
    return Parallel(n_jobs=spec.n_jobs)(delayed(_row)(spec, x) for x in grid)


def _fmt(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return format(float(x) + 0.0, ".12g")


def row_fields(row: SweepRow) -> List[str]:
    r = row.report
    values = [
        row.param, r.chi, r.h_p, r.fidelity_b, r.subentropy_q, r.t1, r.t2, r.t_max,
        r.lb1, r.lb2, r.i_fid, r.i_helstrom, r.i_pgm, r.i_acc_est,
    ]
    return [_fmt(v) for v in values] + ["true" if r.sandwich_ok else "false"]


def write_csv(rows: List[SweepRow], stream: IO[str]) -> None:
    stream.write(CSV_COMMENT + "\n")
    stream.write(CSV_HEADER + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    for row in rows:
        writer.writerow(row_fields(row))


def plot_script(csv_path: str, family: str = "figure1", output: Optional[str] = None) -> str:
    """gnuplot script drawing t_max, subentropy_q, i_pgm, i_helstrom and i_acc_est."""
    xlabel = "theta" if family == "figure2" else "p"
    output = output or csv_path.rsplit(".", 1)[0] + ".png"
    curves = [
        (8, "T (max of theorem bounds)"),
        (5, "Q (subentropy)"),
        (13, "L (pretty good measurement)"),
        (12, "Helstrom basis"),
        (14, "accessible information estimate"),
        (2, "Holevo chi"),
    ]
    plots = ", \\\n     ".join(
        f"'{csv_path}' skip 2 using 1:{col} with lines title '{title}'" for col, title in curves
    )
    return "\n".join(
        [
            "set datafile separator ','",
            "set key top left",
            f"set xlabel '{xlabel}'",
            "set ylabel 'bits'",
            "set terminal pngcairo size 800,600",
            f"set output '{output}'",
            f"plot {plots}",
            "",
        ]
    )
