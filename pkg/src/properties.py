"""Registry of inequality properties checked by the fuzz harness.

Every property maps a ``FuzzCase`` to a margin: the slack of the inequality,
non-negative when it holds. ``None`` marks a case the property could not be
evaluated on (the fidelity-preserving construction rejecting the pair).
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from . import matcore
from .accinfo import OptimizerConfig
from .bounds import (
    CLOSED_FORM_TOL,
    OPTIMIZER_TOL,
    UB2_TOL,
    BoundReport,
    build_report,
    check_report,
    chi_upper_from_fidelity,
    lemma_ub2_gap,
    sandwich_margins,
)
from .ensembles import BinaryEnsemble, average_state, commuting_ensemble, random_ensemble
from .errors import ConfigError, FidelityNotPreserved
from .measurements import (
    classical_fidelity,
    common_eigenbasis_measurement,
    conjugate_ensemble,
    conjugate_povm,
    fidelity_preserving_measurement,
    helstrom_measurement,
    induce_channel,
    measured_information,
    pretty_good_measurement,
    random_orthogonal_measurement,
)
from .measures import (
    SUBENTROPY_CAP,
    fidelity,
    holevo_chi,
    relative_entropy,
    subentropy,
    subentropy_bound,
    upph_gap,
)

LOGGER = logging.getLogger(__name__)

Margin = Optional[float]
Property = Callable[["FuzzCase"], float]

PROPERTIES: Dict[str, Property] = {}

RELATIVE_ENTROPY_TOL = 1e-9
FACT1_TOL = 1e-12
INVARIANCE_TOL = 1e-9
DATA_PROCESSING_TOL = 1e-9
MAX_FUZZ_DIM = 8


def register(name: str) -> Callable[[Property], Property]:
    def wrap(fn: Property) -> Property:
        PROPERTIES[name] = fn
        return fn

    return wrap


@dataclass(frozen=True)
class FuzzSpec:
    """Population of random ensembles for the fuzz harness.

    ``ranks=None`` draws both ranks uniformly from ``1..dim`` per case.
    ``identical`` forces ``rho1 = rho0`` and ``chi_offset`` is added to the
    Holevo quantity of every report; both exist to exercise the harness.
    """

    count: int = 100
    dim: int = 2
    ranks: Optional[Tuple[int, int]] = None
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(restarts=4))
    identical: bool = False
    chi_offset: float = 0.0
    n_jobs: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        if not (2 <= self.dim <= MAX_FUZZ_DIM):
            raise ConfigError(f"dim must be in [2, {MAX_FUZZ_DIM}], got {self.dim}")
        if self.ranks is not None:
            if len(self.ranks) != 2 or not all(1 <= r <= self.dim for r in self.ranks):
                raise ConfigError(f"ranks {self.ranks!r} must be two integers in [1, {self.dim}]")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be non-zero")


@dataclass(frozen=True, eq=False)
class FuzzCase:
    index: int
    seed: int
    ensemble: BinaryEnsemble
    optimizer: OptimizerConfig
    chi_offset: float = 0.0

    @cached_property
    def report(self) -> BoundReport:
        r = build_report(self.ensemble, self.optimizer)
        if self.chi_offset:
            r = check_report(replace(r, chi=r.chi + self.chi_offset))
        return r

    @cached_property
    def commuting(self) -> BinaryEnsemble:
        return commuting_ensemble(self.ensemble.dim, self.ensemble.p, matcore.derive_seed(self.seed, 5))

    def child_seed(self, key: int) -> int:
        return matcore.derive_seed(self.seed, key)


def make_case(spec: FuzzSpec, index: int) -> FuzzCase:
    seed = matcore.derive_seed(spec.seed, index)
    rng = np.random.default_rng(matcore.derive_seed(seed, 9))
    p = float(rng.uniform(0.0, 1.0))
    ranks = spec.ranks or tuple(int(r) for r in rng.integers(1, spec.dim + 1, size=2))
    e = random_ensemble(spec.dim, ranks, p, seed)
    if spec.identical:
        e = BinaryEnsemble(p, e.rho0, e.rho0)
    return FuzzCase(index=index, seed=seed, ensemble=e, optimizer=spec.optimizer, chi_offset=spec.chi_offset)


@register("holevo_bound")
def holevo_bound(case: FuzzCase) -> float:
    r = case.report
    return r.chi + CLOSED_FORM_TOL - max(r.i_fid, r.i_helstrom, r.i_pgm, r.i_acc_est)


@register("lanford_robinson")
def lanford_robinson(case: FuzzCase) -> float:
    r = case.report
    return r.h_p + CLOSED_FORM_TOL - r.chi


@register("theorem_sandwich")
def theorem_sandwich(case: FuzzCase) -> float:
    return min(sandwich_margins(case.report).values())


@register("fidelity_preserved")
def fidelity_preserved(case: FuzzCase) -> float:
    e = case.ensemble
    m = fidelity_preserving_measurement(e.rho0, e.rho1)
    achieved = classical_fidelity(induce_channel(e.with_prior(0.5), m))
    return CLOSED_FORM_TOL - abs(achieved - fidelity(e.rho0, e.rho1))


@register("fidelity_data_processing")
def fidelity_data_processing(case: FuzzCase) -> float:
    e = case.ensemble
    b = fidelity(e.rho0, e.rho1)
    povms = [
        helstrom_measurement(e),
        pretty_good_measurement(e),
        random_orthogonal_measurement(e.dim, case.child_seed(7)),
    ]
    return min(classical_fidelity(induce_channel(e, m)) for m in povms) + DATA_PROCESSING_TOL - b


@register("corollary_chi_cap")
def corollary_chi_cap(case: FuzzCase) -> float:
    r = case.report
    return chi_upper_from_fidelity(r.p, r.fidelity_b) + CLOSED_FORM_TOL - r.chi


@register("dacunha_castelle")
def dacunha_castelle(case: FuzzCase) -> float:
    e = case.ensemble
    s = relative_entropy(e.rho0, e.rho1)
    if math.isinf(s):
        return math.inf
    b = fidelity(e.rho0, e.rho1)
    if b <= 0.0:
        return -math.inf
    return s + 2.0 * math.log2(b) + CLOSED_FORM_TOL


@register("relative_entropy_identity")
def relative_entropy_identity(case: FuzzCase) -> float:
    e = case.ensemble
    avg = average_state(e)
    total = 0.0
    for weight, rho in ((e.p, e.rho0), (1.0 - e.p, e.rho1)):
        if weight == 0.0:
            continue
        s = relative_entropy(rho, avg)
        if math.isinf(s):
            return math.inf
        total += weight * s
    return RELATIVE_ENTROPY_TOL - abs(case.report.chi - total)


@register("subentropy_cap")
def subentropy_cap(case: FuzzCase) -> float:
    return SUBENTROPY_CAP - subentropy(average_state(case.ensemble))


@register("jrw_below_holevo")
def jrw_below_holevo(case: FuzzCase) -> float:
    return holevo_chi(case.ensemble) + CLOSED_FORM_TOL - subentropy_bound(case.ensemble)


@register("fact1_gap")
def fact1_gap(case: FuzzCase) -> float:
    return upph_gap(case.ensemble.p - 0.5) + FACT1_TOL


@register("lemma_ub2_commuting")
def lemma_ub2_commuting(case: FuzzCase) -> float:
    lhs, rhs = lemma_ub2_gap(case.commuting)
    return rhs + UB2_TOL - lhs


@register("commuting_equality")
def commuting_equality(case: FuzzCase) -> float:
    e = case.commuting
    return CLOSED_FORM_TOL - abs(measured_information(e, common_eigenbasis_measurement(e)) - holevo_chi(e))


@register("measurement_invariance")
def measurement_invariance(case: FuzzCase) -> float:
    e = case.ensemble
    u = matcore.haar_unitary(e.dim, case.child_seed(11))
    m = random_orthogonal_measurement(e.dim, case.child_seed(12))
    before = measured_information(e, m)
    after = measured_information(conjugate_ensemble(e, u), conjugate_povm(m, u))
    return INVARIANCE_TOL - abs(before - after)


def run_case(case: FuzzCase) -> Dict[str, Margin]:
    """Margin of every registered property on one case."""
    margins: Dict[str, Margin] = {}
    for name, prop in PROPERTIES.items():
        try:
            margins[name] = float(prop(case))
        except FidelityNotPreserved as exc:
            LOGGER.warning("case %d: %s skipped, %s", case.index, name, exc)
            margins[name] = None
    return margins


@dataclass
class PropertySummary:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    worst_margin: float = math.inf
    worst_case: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        worst = self.worst_margin if math.isfinite(self.worst_margin) else None
        return {
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "worst_margin": worst,
            "worst_case": self.worst_case,
        }


@dataclass
class FuzzSummary:
    cases: int
    properties: Dict[str, PropertySummary]

    @property
    def ok(self) -> bool:
        return all(s.failed == 0 for s in self.properties.values())

    def first_failure(self) -> Optional[Tuple[str, int, float]]:
        """``(property, case index, margin)`` of the worst failing property."""
        failing = [(s.worst_margin, name, s.worst_case) for name, s in self.properties.items() if s.failed]
        if not failing:
            return None
        margin, name, index = min(failing)
        return name, index, margin

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cases": self.cases,
            "ok": self.ok,
            "properties": {name: s.to_dict() for name, s in self.properties.items()},
        }


def summarize(results: List[Dict[str, Margin]]) -> FuzzSummary:
    summary = {name: PropertySummary() for name in PROPERTIES}
    for index, margins in enumerate(results):
        for name, margin in margins.items():
            s = summary.setdefault(name, PropertySummary())
            if margin is None:
                s.skipped += 1
                continue
            if margin >= 0.0:
                s.passed += 1
            else:
                s.failed += 1
            if margin < s.worst_margin or s.worst_case is None:
                s.worst_margin, s.worst_case = margin, index
    return FuzzSummary(cases=len(results), properties=summary)


def _evaluate(spec: FuzzSpec, index: int) -> Dict[str, Margin]:
    return run_case(make_case(spec, index))


def run_fuzz(spec: FuzzSpec) -> FuzzSummary:
    """Run every property on ``spec.count`` cases; joblib keeps results in case order."""
    results = Parallel(n_jobs=spec.n_jobs)(delayed(_evaluate)(spec, i) for i in range(spec.count))
    summary = summarize(results)
    for name, s in summary.properties.items():
        if s.failed:
            LOGGER.warning("%s failed on %d of %d cases (worst margin %.3e)", name, s.failed, spec.count, s.worst_margin)
    return summary
