"""Closed-form lower and upper bounds on accessible information, and the
per-ensemble report that chains them against the measured values.

The theorem bounds take ``(p, chi)`` scalars rather than ensembles so they can
be swept and plotted without any linear algebra.
"""

from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Optional, Tuple
import logging
import math

from .accinfo import OptimizerConfig, optimize_accessible_information
from .ensembles import BinaryEnsemble, average_state
from .errors import DomainError, NotCommuting
from .measurements import (
    COMMUTING_TOL,
    fidelity_preserving_measurement,
    helstrom_measurement,
    measured_information,
    pretty_good_measurement,
)
from .measures import (
    binary_entropy,
    fidelity,
    helstrom_success_probability,
    measure_report,
    subentropy_bound,
)
from . import matcore

LOGGER = logging.getLogger(__name__)

# chi^2 may exceed 4p(1-p) by this much before the inputs count as inconsistent
RADICAND_WINDOW = 1e-9
ORDERING_TOL = 1e-10
CLOSED_FORM_TOL = 1e-8
OPTIMIZER_TOL = 1e-3
UB2_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    p: float
    chi: float
    fidelity_b: float
    h_p: float
    t1: float
    t2: float
    lb1: float
    lb2: float
    subentropy_q: float
    i_fid: float
    i_helstrom: float
    i_pgm: float
    i_acc_est: float
    sandwich_ok: bool = True
    jrw_bound: float = 0.0
    p_guess: float = 0.0

    @property
    def t_max(self) -> float:
        return max(self.t1, self.t2)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["t_max"] = self.t_max
        return out


def _check_prior(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"prior p = {p!r} outside [0, 1]")


def _check_fidelity(b: float) -> float:
    if not (-1e-12 <= b <= 1.0 + 1e-12):
        raise DomainError(f"fidelity {b!r} outside [0, 1]")
    return min(1.0, max(0.0, b))


def _radicand(p: float, chi: float) -> float:
    _check_prior(p)
    if chi < -RADICAND_WINDOW:
        raise DomainError(f"chi = {chi!r} is negative")
    r = 4.0 * p * (1.0 - p) - chi * chi
    if r < -RADICAND_WINDOW:
        raise DomainError(
            f"chi^2 = {chi * chi:.12g} exceeds 4p(1-p) = {4.0 * p * (1.0 - p):.12g} by {-r:.3e}"
        )
    return max(0.0, r)


def theorem_bound_1(p: float, chi: float) -> float:
    """``H(p) - sqrt(4p(1-p) - chi^2)``; negative for some priors."""
    return binary_entropy(p) - math.sqrt(_radicand(p, chi))


def theorem_bound_2(p: float, chi: float) -> float:
    """``-log2[p^2 + (1-p)^2 + 2p(1-p) sqrt(1 - chi^2 / 4p(1-p))]``, in [0, 1].

    The square-root term is evaluated as ``sqrt(p(1-p) (4p(1-p) - chi^2))`` so
    the bracket is exactly 1 at ``p`` in {0, 1}.
    """
    r = _radicand(p, chi)
    bracket = p * p + (1.0 - p) ** 2 + math.sqrt(p * (1.0 - p) * r)
    return min(1.0, max(0.0, -math.log2(min(1.0, bracket))))


def fidelity_bound_1(p: float, b: float) -> float:
    _check_prior(p)
    return binary_entropy(p) - 2.0 * math.sqrt(p * (1.0 - p)) * _check_fidelity(b)


def fidelity_bound_2(p: float, b: float) -> float:
    _check_prior(p)
    bracket = p * p + (1.0 - p) ** 2 + 2.0 * p * (1.0 - p) * _check_fidelity(b)
    return max(0.0, -math.log2(min(1.0, bracket)))


def chi_upper_from_fidelity(p: float, b: float) -> float:
    """Upper bound ``2 sqrt(p(1-p)(1 - B^2))`` on the Holevo quantity."""
    _check_prior(p)
    b = _check_fidelity(b)
    return min(1.0, 2.0 * math.sqrt(p * (1.0 - p) * (1.0 - b * b)))


def weak_equal_prior_bound(eps: float) -> float:
    """``1 - sqrt(2 eps)`` for an equal-prior ensemble with ``chi = 1 - eps``."""
    if not (0.0 <= eps <= 1.0):
        raise DomainError(f"eps = {eps!r} outside [0, 1]")
    return 1.0 - math.sqrt(2.0 * eps)


def lemma_ub2_gap(e: BinaryEnsemble) -> Tuple[float, float]:
    """``(p B(rho0, rho) + (1-p) B(rho1, rho), sqrt(p^2 + (1-p)^2 + 2p(1-p) B(rho0, rho1)))``.

    Raises:
        NotCommuting: if the states do not commute within ``COMMUTING_TOL``.
    """
    gap = matcore.commutator_norm(e.rho0.matrix, e.rho1.matrix)
    if gap > COMMUTING_TOL:
        raise NotCommuting(f"max|[rho0, rho1]| = {gap:.3e} exceeds {COMMUTING_TOL:g}")
    p = e.p
    avg = average_state(e)
    lhs = p * fidelity(e.rho0, avg) + (1.0 - p) * fidelity(e.rho1, avg)
    rhs = math.sqrt(p * p + (1.0 - p) ** 2 + 2.0 * p * (1.0 - p) * fidelity(e.rho0, e.rho1))
    return lhs, rhs


def sandwich_margins(r: BoundReport) -> Dict[str, float]:
    """Slack of every chained relation of the report; negative means violated."""
    lb = max(r.lb1, r.lb2)
    margins = {
        "t1<=lb1": r.lb1 + ORDERING_TOL - r.t1,
        "t2<=lb2": r.lb2 + ORDERING_TOL - r.t2,
        "lb<=i_fid": r.i_fid + CLOSED_FORM_TOL - lb,
        "chi<=h_p": r.h_p + CLOSED_FORM_TOL - r.chi,
        "chi<=corollary": chi_upper_from_fidelity(r.p, r.fidelity_b) + CLOSED_FORM_TOL - r.chi,
        "i_acc_est<=chi": r.chi + CLOSED_FORM_TOL - r.i_acc_est,
    }
    for name in ("i_fid", "i_helstrom", "i_pgm"):
        margins[f"{name}<=i_acc_est"] = r.i_acc_est + OPTIMIZER_TOL - getattr(r, name)
    return margins


def sandwich_violations(r: BoundReport) -> List[Tuple[str, float]]:
    return [(name, m) for name, m in sandwich_margins(r).items() if m < 0.0]


def build_report(e: BinaryEnsemble, cfg: Optional[OptimizerConfig] = None) -> BoundReport:
    """Evaluate every bound and measured information for one ensemble.

    ``sandwich_ok`` is false iff ``sandwich_violations`` is non-empty; each
    violation is logged at WARNING with its margin.
    """
    cfg = cfg or OptimizerConfig()
    p = e.p
    measures = measure_report(e)
    chi, b = measures.chi, measures.fidelity_b

    i_fid = measured_information(e, fidelity_preserving_measurement(e.rho0, e.rho1))
    i_helstrom = measured_information(e, helstrom_measurement(e))
    i_pgm = measured_information(e, pretty_good_measurement(e))
    acc = optimize_accessible_information(e, cfg)

    report = BoundReport(
        p=p,
        chi=chi,
        fidelity_b=b,
        h_p=measures.binary_entropy_p,
        t1=theorem_bound_1(p, chi),
        t2=theorem_bound_2(p, chi),
        lb1=fidelity_bound_1(p, b),
        lb2=fidelity_bound_2(p, b),
        subentropy_q=measures.subentropy_q,
        i_fid=i_fid,
        i_helstrom=i_helstrom,
        i_pgm=i_pgm,
        i_acc_est=acc.value,
        jrw_bound=subentropy_bound(e),
        p_guess=helstrom_success_probability(e),
    )
    return check_report(report)


def check_report(r: BoundReport) -> BoundReport:
    """Recompute ``sandwich_ok`` for ``r`` (after edits) and log what fails."""
    violations = sandwich_violations(r)
    for name, margin in violations:
        LOGGER.warning("sandwich relation %s violated at p=%.6g (margin %.3e)", name, r.p, margin)
    return replace(r, sandwich_ok=not violations)
