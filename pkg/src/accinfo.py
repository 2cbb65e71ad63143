"""Numerical estimate of accessible information by multistart local search.

A POVM with ``K`` rank-one outcomes is parameterized by ``K`` unconstrained
complex vectors ``a_m``; ``canonicalize_povm`` maps them onto the feasible
set through ``E_m = G^-1/2 a_m a_m^dagger G^-1/2`` with ``G = sum a_m a_m^dagger``.
Each restart runs a derivative-free coordinate descent on the real and
imaginary parts of the vectors. The reported value is the best restart; it is
a lower estimate of the accessible information, the Holevo quantity is the
certified upper bound.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple
import logging

import numpy as np
from joblib import Parallel, delayed
from scipy.special import entr

from . import matcore
from .ensembles import BinaryEnsemble
from .errors import ConfigError, DegenerateInput, DimensionMismatch, DomainError, FidelityNotPreserved
from .measures import LN2, binary_entropy
from .measurements import (
    KERNEL_WEIGHT,
    Povm,
    channel_from_distributions,
    common_eigenbasis_measurement,
    fidelity_preserving_measurement,
    helstrom_measurement,
    measured_information,
    mutual_information,
    povm_vectors,
    pretty_good_measurement,
    random_orthogonal_measurement,
)

LOGGER = logging.getLogger(__name__)

# relative to Tr G
GRAM_THRESHOLD = 1e-12
VECTOR_FLOOR = 1e-12
MIN_SWEEPS = 10

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the multistart search.

    ``outcomes=None`` means ``d**2`` outcomes, enough for an optimal POVM of a
    ``d``-dimensional ensemble. ``n_jobs`` is handed to joblib unchanged.
    """

    outcomes: Optional[int] = None
    restarts: int = 32
    max_iterations: int = 2000
    step_tolerance: float = 1e-10
    value_tolerance: float = 1e-10
    seed: int = 0
    n_jobs: int = 1
    initial_step: float = 0.1

    def __post_init__(self):
        if self.outcomes is not None and self.outcomes < 2:
            raise ConfigError(f"outcomes must be >= 2, got {self.outcomes}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not (self.step_tolerance > 0 and self.value_tolerance > 0):
            raise ConfigError("tolerances must be positive")
        if not self.initial_step > self.step_tolerance:
            raise ConfigError(
                f"initial_step {self.initial_step!r} must exceed step_tolerance {self.step_tolerance!r}"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be non-zero")

    def outcomes_for(self, d: int) -> int:
        return self.outcomes if self.outcomes is not None else max(2, d * d)


@dataclass(frozen=True, eq=False)
class AccInfoResult:
    value: float
    best_povm: Povm
    restarts_agreeing: int
    iterations_used: int
    restart_values: Tuple[float, ...] = ()
    best_restart: str = ""


@dataclass(frozen=True, eq=False)
class _Restart:
    index: int
    label: str
    value: float
    povm: Povm
    iterations: int


def _gram(a: np.ndarray) -> np.ndarray:
    # rows of a are the vectors a_m; G = sum_m a_m a_m^dagger
    return a.T @ a.conj()


def _inverse_root(g: np.ndarray) -> np.ndarray:
    """Pseudo-inverse square root of the frame operator, via LAPACK ``eigh``.

    Eigenvalues at or below ``GRAM_THRESHOLD * Tr G`` are treated as zero.
    """
    g = 0.5 * (g + g.conj().T)
    w, v = np.linalg.eigh(g)
    keep = w > GRAM_THRESHOLD * float(np.trace(g).real)
    scale = np.zeros_like(w)
    scale[keep] = 1.0 / np.sqrt(w[keep])
    return (v * scale) @ v.conj().T


def canonicalize_povm(vectors) -> Povm:
    """Rank-one POVM ``G^-1/2 a_m a_m^dagger G^-1/2`` from ``K x d`` vectors.

    If ``G`` is rank-deficient the projector onto its kernel is appended as one
    more outcome.

    Raises:
        DegenerateInput: if every vector has norm below ``VECTOR_FLOOR``.
    """
    a = np.asarray(vectors, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DegenerateInput(f"expected a K x d array of vectors, got shape {a.shape}")
    if float(np.max(np.linalg.norm(a, axis=1))) < VECTOR_FLOOR:
        raise DegenerateInput(f"all {a.shape[0]} vectors have norm below {VECTOR_FLOOR:g}")
    g = _gram(a)
    r = _inverse_root(g)
    b = a @ r.T
    elements = [np.outer(v, v.conj()) for v in b]
    kernel = np.eye(a.shape[1]) - r @ g @ r
    kernel = 0.5 * (kernel + kernel.conj().T)
    if float(np.max(np.abs(kernel))) > KERNEL_WEIGHT:
        elements.append(kernel)
    return Povm(elements, label="canonical")


def _pack(a: np.ndarray) -> np.ndarray:
    flat = a.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def _unpack(x: np.ndarray, k: int, d: int) -> np.ndarray:
    n = k * d
    return (x[:n] + 1j * x[n:]).reshape(k, d)


def _objective(e: BinaryEnsemble, k: int) -> Objective:
    """Measured information of ``canonicalize_povm(unpack(x))`` without building a Povm."""
    d = e.dim
    rho0, rho1 = e.rho0.matrix, e.rho1.matrix

    def information(x: np.ndarray) -> float:
        a = _unpack(x, k, d)
        g = _gram(a)
        if float(np.trace(g).real) < VECTOR_FLOOR ** 2:
            return 0.0
        r = _inverse_root(g)
        b = a @ r.T
        q0 = np.einsum("mi,ij,mj->m", b.conj(), rho0, b).real
        q1 = np.einsum("mi,ij,mj->m", b.conj(), rho1, b).real
        kernel = np.eye(d) - r @ g @ r
        if float(np.max(np.abs(kernel))) > KERNEL_WEIGHT:
            q0 = np.append(q0, np.trace(kernel @ rho0).real)
            q1 = np.append(q1, np.trace(kernel @ rho1).real)
        return mutual_information(channel_from_distributions(e.p, q0, q1))

    return information


def _coordinate_descent(x0: np.ndarray, f: Objective, cfg: OptimizerConfig) -> Tuple[np.ndarray, int]:
    """Maximize ``f`` by +-step moves per coordinate, halving the step on a flat sweep."""
    x = x0.copy()
    best = f(x)
    step = cfg.initial_step
    sweeps = 0
    while sweeps < cfg.max_iterations:
        sweeps += 1
        before = best
        for i in range(x.size):
            keep = x[i]
            for delta in (step, -step):
                x[i] = keep + delta
                value = f(x)
                if value > best:
                    best = value
                    break
            else:
                x[i] = keep
        if best - before <= cfg.value_tolerance:
            step *= 0.5
            if step < cfg.step_tolerance and sweeps >= MIN_SWEEPS:
                break
    return x, sweeps


def _warm_starts(e: BinaryEnsemble) -> List[Tuple[str, Povm]]:
    starts = []
    try:
        starts.append(("fidelity_preserving", fidelity_preserving_measurement(e.rho0, e.rho1)))
    except FidelityNotPreserved as exc:
        LOGGER.debug("skipping fidelity-preserving warm start: %s", exc)
    starts.append(("helstrom", helstrom_measurement(e)))
    starts.append(("pgm", pretty_good_measurement(e)))
    if matcore.commutator_norm(e.rho0.matrix, e.rho1.matrix) <= 1e-8:
        starts.append(("common_eigenbasis", common_eigenbasis_measurement(e)))
    return starts


def _random_start(d: int, k: int, seed: int, j: int) -> Tuple[str, np.ndarray]:
    child = matcore.derive_seed(seed, j)
    if j % 2 == 0 and d <= k:
        return f"random_orthogonal[{j}]", povm_vectors(random_orthogonal_measurement(d, child))
    rng = np.random.default_rng(child)
    a = (rng.standard_normal((k, d)) + 1j * rng.standard_normal((k, d))) / np.sqrt(2.0 * d)
    return f"gaussian[{j}]", a


def _pad(a: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((k, a.shape[1]), dtype=complex)
    out[: a.shape[0]] = a
    return out


def _run_restart(
    e: BinaryEnsemble,
    cfg: OptimizerConfig,
    index: int,
    label: str,
    start: np.ndarray,
    fallback: Optional[Povm],
) -> _Restart:
    k = cfg.outcomes_for(e.dim)
    if start.shape[0] > k:
        # more rank-one factors than outcomes: keep the named measurement as is
        value = measured_information(e, fallback)
        LOGGER.debug("restart %d (%s): %d factors > %d outcomes, not refined", index, label, start.shape[0], k)
        return _Restart(index, label, value, fallback, 0)
    x, sweeps = _coordinate_descent(_pack(_pad(start, k)), _objective(e, k), cfg)
    povm = canonicalize_povm(_unpack(x, k, e.dim))
    value = measured_information(e, povm)
    if fallback is not None:
        named = measured_information(e, fallback)
        if named > value:
            value, povm = named, fallback
    LOGGER.debug("restart %d (%s): %.12g after %d sweeps", index, label, value, sweeps)
    return _Restart(index, label, value, povm, sweeps)


def optimize_accessible_information(e: BinaryEnsemble, cfg: Optional[OptimizerConfig] = None) -> AccInfoResult:
    """Best measured information over warm-started and random local searches.

    Warm starts are the fidelity-preserving, Helstrom, pretty-good and (for
    commuting states) common-eigenbasis measurements; ``cfg.restarts`` random
    starts follow, alternating Haar-random orthogonal bases and Gaussian
    vectors. The merge takes the largest value, lowest restart index on ties,
    so the result does not depend on ``n_jobs``.
    """
    cfg = cfg or OptimizerConfig()
    d = e.dim
    if e.p in (0.0, 1.0):
        return AccInfoResult(
            value=0.0,
            best_povm=Povm([np.eye(d)], label="identity"),
            restarts_agreeing=cfg.restarts,
            iterations_used=0,
            restart_values=(0.0,) * cfg.restarts,
            best_restart="identity",
        )

    k = cfg.outcomes_for(d)
    jobs = []
    for label, povm in _warm_starts(e):
        jobs.append((label, povm_vectors(povm), povm))
    for j in range(cfg.restarts):
        label, a = _random_start(d, k, cfg.seed, j)
        jobs.append((label, a, None))

    restarts = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_run_restart)(e, cfg, i, label, start, named)
        for i, (label, start, named) in enumerate(jobs)
    )
    best = max(restarts, key=lambda r: (r.value, -r.index))
    agreeing = sum(1 for r in restarts if best.value - r.value <= cfg.value_tolerance)
    LOGGER.debug("best restart %d (%s) = %.12g, %d agreeing", best.index, best.label, best.value, agreeing)
    return AccInfoResult(
        value=best.value,
        best_povm=best.povm,
        restarts_agreeing=agreeing,
        iterations_used=best.iterations,
        restart_values=tuple(r.value for r in restarts),
        best_restart=best.label,
    )


def _bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([2.0 * rho[0, 1].real, -2.0 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def qubit_projective_grid(e: BinaryEnsemble, resolution: int) -> float:
    """Best two-outcome projective measurement over a Bloch-sphere axis grid.

    Axes are ``(theta, phi)`` on ``linspace(0, pi, r) x linspace(0, 2 pi, r)``.
    The grid for ``r'`` contains the grid for ``r`` whenever ``r' - 1`` is a
    multiple of ``r - 1``.

    Raises:
        DimensionMismatch: for ensembles that are not qubits.
        DomainError: if ``resolution < 2``.
    """
    if e.dim != 2:
        raise DimensionMismatch(f"projective grid needs qubits, got dimension {e.dim}")
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")
    if e.p in (0.0, 1.0):
        return 0.0
    theta, phi = np.meshgrid(np.linspace(0.0, np.pi, resolution), np.linspace(0.0, 2.0 * np.pi, resolution))
    axes = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    c0 = axes @ _bloch_vector(e.rho0.matrix)
    c1 = axes @ _bloch_vector(e.rho1.matrix)

    p = e.p
    conditional = np.zeros_like(c0)
    for sign in (1.0, -1.0):
        q0 = np.clip(0.5 * (1.0 + sign * c0), 0.0, 1.0)
        q1 = np.clip(0.5 * (1.0 + sign * c1), 0.0, 1.0)
        q = p * q0 + (1.0 - p) * q1
        with np.errstate(divide="ignore", invalid="ignore"):
            r0 = np.where(q > 0.0, np.clip(p * q0 / q, 0.0, 1.0), p)
        conditional += q * (entr(r0) + entr(1.0 - r0)) / LN2
    return float(max(0.0, np.max(binary_entropy(p) - conditional)))
