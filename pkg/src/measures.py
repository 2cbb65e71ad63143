"""Scalar information measures on density matrices and binary ensembles.

All logarithms are base 2; entropies are in bits. Eigenvalues below
``ZERO_EIGENVALUE`` count as exactly zero in entropy sums (0 log 0 = 0).
"""

from dataclasses import asdict, dataclass
from typing import Dict
import logging
import math

import numpy as np
from scipy import integrate
from scipy.special import entr, xlogy

from . import matcore
from .ensembles import BinaryEnsemble, DensityMatrix, average_state
from .errors import DimensionMismatch, DomainError

LOGGER = logging.getLogger(__name__)

LN2 = math.log(2.0)
ZERO_EIGENVALUE = 1e-12
# relative to the largest eigenvalue of sigma
SUPPORT_THRESHOLD = 1e-10
# weight of rho outside supp(sigma) above which S(rho||sigma) is infinite
ESCAPE_WEIGHT = 1e-8
DEGENERATE_GAP = 1e-6
# largest rounding error accepted from the product form of the subentropy
PRODUCT_ERROR = 1e-12
# (1 - Euler gamma) * log2(e)
SUBENTROPY_CAP = 0.60995


@dataclass(frozen=True)
class MeasureReport:
    chi: float
    fidelity_b: float
    subentropy_q: float
    entropy_avg: float
    entropy_rho0: float
    entropy_rho1: float
    binary_entropy_p: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")


def _clean_spectrum(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float).copy()
    w[w < ZERO_EIGENVALUE] = 0.0
    return w


def binary_entropy(p: float) -> float:
    """``H(p) = -p log p - (1-p) log(1-p)``."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p!r}")
    return float((entr(p) + entr(1.0 - p)) / LN2)


def shannon_entropy(probabilities) -> float:
    q = _clean_spectrum(probabilities)
    return float(entr(q).sum() / LN2)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return shannon_entropy(rho.spectrum.eigenvalues)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``S(rho||sigma)`` in bits, ``inf`` when supp(rho) escapes supp(sigma)."""
    _check_dims(rho, sigma)
    lam = _clean_spectrum(rho.spectrum.eigenvalues)
    mu = sigma.spectrum.eigenvalues
    overlap = np.abs(rho.spectrum.eigenvectors.conj().T @ sigma.spectrum.eigenvectors) ** 2
    kernel = mu <= SUPPORT_THRESHOLD * max(float(mu.max()), 0.0)

    escaped = float(lam @ overlap[:, kernel].sum(axis=1)) if kernel.any() else 0.0
    if escaped > ESCAPE_WEIGHT:
        return math.inf

    own = float(xlogy(lam, lam).sum())
    support = ~kernel
    cross = float(lam @ (overlap[:, support] @ np.log(mu[support])))
    return max(0.0, (own - cross) / LN2)


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``B(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_tr``, clamped to [0, 1]."""
    _check_dims(rho, sigma)
    return min(1.0, matcore.trace_norm(rho.sqrt @ sigma.sqrt))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    _check_dims(rho, sigma)
    return 0.5 * matcore.trace_norm(rho.matrix - sigma.matrix)


def helstrom_success_probability(e: BinaryEnsemble) -> float:
    """Optimal probability of guessing which state was sent."""
    gamma = e.p * e.rho0.matrix - (1.0 - e.p) * e.rho1.matrix
    return min(1.0, 0.5 + 0.5 * matcore.trace_norm(gamma))


def holevo_chi(e: BinaryEnsemble) -> float:
    """``S(p rho0 + (1-p) rho1) - p S(rho0) - (1-p) S(rho1)``."""
    chi = (
        von_neumann_entropy(average_state(e))
        - e.p * von_neumann_entropy(e.rho0)
        - (1.0 - e.p) * von_neumann_entropy(e.rho1)
    )
    return max(0.0, chi)


def pure_pair_chi(theta: float, p: float) -> float:
    """Holevo information of two pure states at angle ``theta`` with prior ``p``."""
    if not (-1e-12 <= theta <= math.pi / 2 + 1e-12):
        raise DomainError(f"angle {theta!r} outside [0, pi/2]")
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"prior {p!r} outside [0, 1]")
    disc = max(0.0, 1.0 - 4.0 * p * (1.0 - p) * math.sin(theta) ** 2)
    return binary_entropy(min(1.0, (1.0 + math.sqrt(disc)) / 2.0))


def _product_weights(lam: np.ndarray) -> np.ndarray:
    """``prod_{j != k} lam_k / (lam_k - lam_j)`` for every k (0 where lam_k is 0)."""
    weights = np.zeros_like(lam)
    for k, lk in enumerate(lam):
        if lk > 0.0:
            weights[k] = np.prod(lk / (lk - np.delete(lam, k)))
    return weights


def _subentropy_product(lam: np.ndarray, weights: np.ndarray) -> float:
    live = lam > 0.0
    return -float(np.sum(weights[live] * lam[live] * np.log2(lam[live])))


def _subentropy_confluent(lam: np.ndarray) -> float:
    # Divided difference of -x^d log x over the spectrum, written as
    #   Q = (1/ln 2) * int_0^inf [ s/(1+s) - prod_i s/(lam_i + s) ] ds
    # which has no division by eigenvalue gaps. The tail uses u = 1/s.
    # Zero eigenvalues contribute a factor of 1 and are dropped.
    lam = lam[lam > 0.0]
    lam = lam / lam.sum()

    def head(s: float) -> float:
        return s / (1.0 + s) - float(np.prod(s / (lam + s)))

    def tail(u: float) -> float:
        if u == 0.0:
            return 0.5 * (1.0 - float(np.sum(lam ** 2)))
        a = math.log1p(u)
        b = float(np.sum(np.log1p(lam * u)))
        return -math.exp(-a) * math.expm1(a - b) / (u * u)

    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=200)
    head_val, _ = integrate.quad(head, 0.0, 1.0, **opts)
    tail_val, _ = integrate.quad(tail, 0.0, 1.0, **opts)
    return (head_val + tail_val) / LN2


def subentropy(rho: DensityMatrix) -> float:
    """Subentropy ``Q(rho)`` in bits, in ``[0, min(S(rho), SUBENTROPY_CAP)]``.

    Uses the closed product form when the spectrum is well separated. Its
    weights grow like ``gap^-(d-1)``, so the confluent divided-difference limit
    takes over when two eigenvalues lie within ``DEGENERATE_GAP`` of each other
    or when the weights would amplify rounding beyond ``PRODUCT_ERROR``.
    """
    lam = np.sort(_clean_spectrum(rho.spectrum.eigenvalues))
    if lam.size < 2 or np.count_nonzero(lam) < 2:
        return 0.0
    q = None
    if float(np.min(np.diff(lam))) >= DEGENERATE_GAP:
        weights = _product_weights(lam)
        if float(np.max(np.abs(weights))) * np.finfo(float).eps <= PRODUCT_ERROR:
            q = _subentropy_product(lam, weights)
    if q is None:
        q = _subentropy_confluent(lam)
    return min(max(0.0, q), von_neumann_entropy(rho), SUBENTROPY_CAP)


def subentropy_bound(e: BinaryEnsemble) -> float:
    """Expected information of a uniformly random complete orthogonal measurement."""
    return (
        subentropy(average_state(e))
        - e.p * subentropy(e.rho0)
        - (1.0 - e.p) * subentropy(e.rho1)
    )


def upph_gap(delta: float) -> float:
    """``sqrt(1 - (2 delta)^2) - H(1/2 + delta)``; never negative."""
    if not (-0.5 - 1e-15 <= delta <= 0.5 + 1e-15):
        raise DomainError(f"delta {delta!r} outside [-1/2, 1/2]")
    x = min(1.0, max(0.0, 0.5 + delta))
    return math.sqrt(max(0.0, 1.0 - 4.0 * delta * delta)) - binary_entropy(x)


def measure_report(e: BinaryEnsemble) -> MeasureReport:
    avg = average_state(e)
    s_avg = von_neumann_entropy(avg)
    s0 = von_neumann_entropy(e.rho0)
    s1 = von_neumann_entropy(e.rho1)
    return MeasureReport(
        chi=max(0.0, s_avg - e.p * s0 - (1.0 - e.p) * s1),
        fidelity_b=fidelity(e.rho0, e.rho1),
        subentropy_q=subentropy(avg),
        entropy_avg=s_avg,
        entropy_rho0=s0,
        entropy_rho1=s1,
        binary_entropy_p=binary_entropy(e.p),
    )
