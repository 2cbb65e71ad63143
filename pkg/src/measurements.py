"""POVMs, the classical channel they induce on a binary ensemble, and the
named measurement constructions.

Constructions:
    fidelity_preserving_measurement  complete orthogonal, keeps B(rho0, rho1)
    helstrom_measurement             eigenbasis of p rho0 - (1-p) rho1
    pretty_good_measurement          p_i rho^-1/2 rho_i rho^-1/2 on supp(rho)
    common_eigenbasis_measurement    commuting ensembles only
    random_orthogonal_measurement    columns of a Haar unitary
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Optional, Sequence
import logging

import numpy as np
from scipy.special import entr

from . import matcore
from .ensembles import BinaryEnsemble, DensityMatrix, average_state
from .errors import (
    DimensionMismatch,
    FidelityNotPreserved,
    IncompletePovm,
    NotCommuting,
    NotPositive,
)
from .measures import LN2, binary_entropy, fidelity, shannon_entropy

LOGGER = logging.getLogger(__name__)

ELEMENT_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
NEGLIGIBLE_OUTCOME = 1e-15
COMMUTING_TOL = 1e-8
FIDELITY_CHECK_TOL = 1e-8
KERNEL_WEIGHT = 1e-12


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite list of PSD operators summing to the identity."""

    elements: Sequence[np.ndarray]
    label: str = ""

    def __post_init__(self):
        elems = []
        for i, e in enumerate(self.elements):
            m = matcore.as_matrix(e)
            lowest = float(matcore.hermitian_eig(m).eigenvalues[0])
            if lowest < -ELEMENT_TOL:
                raise NotPositive(f"element {i} has eigenvalue {lowest:.3e}")
            m = 0.5 * (m + m.conj().T)
            m.flags.writeable = False
            elems.append(m)
        if not elems:
            raise IncompletePovm("a POVM needs at least one element")
        d = elems[0].shape[0]
        if any(m.shape != (d, d) for m in elems):
            raise DimensionMismatch("POVM elements have different dimensions")
        residual = float(np.max(np.abs(sum(elems) - np.eye(d))))
        if residual > COMPLETENESS_TOL:
            raise IncompletePovm(f"max|sum E_m - I| = {residual:.3e} exceeds {COMPLETENESS_TOL:g}")
        object.__setattr__(self, "elements", tuple(elems))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.elements)

    @cached_property
    def stack(self) -> np.ndarray:
        return np.array(self.elements)


@dataclass(frozen=True, eq=False)
class InducedChannel:
    """Joint law of (X, outcome): ``q(m) r0(m) = p q0(m)``."""

    p: float
    q0: np.ndarray
    q1: np.ndarray
    q: np.ndarray
    r0: np.ndarray


def channel_from_distributions(p: float, q0, q1) -> InducedChannel:
    q0 = np.clip(np.asarray(q0, dtype=float), 0.0, None)
    q1 = np.clip(np.asarray(q1, dtype=float), 0.0, None)
    if q0.shape != q1.shape:
        raise DimensionMismatch(f"outcome counts {q0.size} and {q1.size} differ")
    q = p * q0 + (1.0 - p) * q1
    live = q >= NEGLIGIBLE_OUTCOME
    r0 = np.full_like(q, p)
    r0[live] = np.clip(p * q0[live] / q[live], 0.0, 1.0)
    return InducedChannel(p=p, q0=q0, q1=q1, q=q, r0=r0)


def induce_channel(e: BinaryEnsemble, m: Povm) -> InducedChannel:
    """Outcome statistics ``q_i(m) = Tr(E_m rho_i)``."""
    if e.dim != m.dim:
        raise DimensionMismatch(f"ensemble dimension {e.dim}, POVM dimension {m.dim}")
    q0 = np.einsum("mij,ji->m", m.stack, e.rho0.matrix).real
    q1 = np.einsum("mij,ji->m", m.stack, e.rho1.matrix).real
    return channel_from_distributions(e.p, q0, q1)


def mutual_information(c: InducedChannel) -> float:
    """``H(p) - sum_m q(m) H(r0(m))``."""
    live = c.q >= NEGLIGIBLE_OUTCOME
    r = c.r0[live]
    conditional = float(c.q[live] @ ((entr(r) + entr(1.0 - r)) / LN2))
    return max(0.0, binary_entropy(c.p) - conditional)


def measured_information(e: BinaryEnsemble, m: Povm) -> float:
    return mutual_information(induce_channel(e, m))


def classical_fidelity(c: InducedChannel) -> float:
    """Bhattacharyya overlap ``sum_m sqrt(q0(m) q1(m))``.

    Probabilities below ``NEGLIGIBLE_OUTCOME`` count as zero; under the square
    root, rounding noise of order 1e-16 would otherwise add about 1e-8.
    """
    q0 = np.where(c.q0 < NEGLIGIBLE_OUTCOME, 0.0, c.q0)
    q1 = np.where(c.q1 < NEGLIGIBLE_OUTCOME, 0.0, c.q1)
    return min(1.0, float(np.sum(np.sqrt(q0 * q1))))


def guessing_probability(c: InducedChannel) -> float:
    """Success probability of the maximum-a-posteriori guess."""
    return float(np.sum(np.maximum(c.p * c.q0, (1.0 - c.p) * c.q1)))


def _hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _rank_one(vectors: np.ndarray) -> List[np.ndarray]:
    return [np.outer(v, v.conj()) for v in vectors.T]


def _orthogonal(basis: np.ndarray, label: str, extra: Optional[List[np.ndarray]] = None) -> Povm:
    return Povm(_rank_one(basis) + (extra or []), label=label)


def _anchored_basis(rho0: DensityMatrix, rho1: DensityMatrix) -> Povm:
    anchor, other = rho1, rho0
    if rho0.rank > rho1.rank:
        LOGGER.debug("anchoring on rho0 (rank %d > %d)", rho0.rank, rho1.rank)
        anchor, other = rho0, rho1

    w = anchor.spectrum.eigenvalues
    v = anchor.spectrum.eigenvectors
    support = w > matcore.PSEUDO_THRESHOLD * float(w.max())
    vs, vk = v[:, support], v[:, ~support]

    s = np.sqrt(w[support])
    other_s = vs.conj().T @ other.matrix @ vs
    root = matcore.sqrtm_psd(s[:, None] * other_s * s[None, :])
    o = root / s[:, None] / s[None, :]
    basis = [vs @ matcore.hermitian_eig(0.5 * (o + o.conj().T)).eigenvectors]

    extra: List[np.ndarray] = []
    if vk.shape[1]:
        comp = matcore.hermitian_eig(vk.conj().T @ other.matrix @ vk)
        seen = comp.eigenvalues > KERNEL_WEIGHT
        basis.append(vk @ comp.eigenvectors[:, seen])
        joint = vk @ comp.eigenvectors[:, ~seen]
        if joint.shape[1]:
            extra.append(joint @ joint.conj().T)
    return _orthogonal(np.hstack(basis), "fidelity_preserving", extra)


def _difference_basis(rho0: DensityMatrix, rho1: DensityMatrix) -> Povm:
    return _orthogonal(
        matcore.hermitian_eig(rho0.matrix - rho1.matrix).eigenvectors, "fidelity_preserving"
    )


def fidelity_preserving_measurement(rho0: DensityMatrix, rho1: DensityMatrix) -> Povm:
    """Complete orthogonal measurement whose outcome laws keep the fidelity.

    For a full-rank anchor the basis is unique: it diagonalizes
    ``sigma^-1/2 (sigma^1/2 rho sigma^1/2)^1/2 sigma^-1/2`` where the anchor
    ``sigma`` is the state of larger rank (rho1 on ties). When either state is
    singular many bases keep the fidelity; the eigenbasis of ``rho0 - rho1`` is
    tried first (it is the symmetric choice for pure pairs), then the anchored
    basis, whose kernel is split along the eigenvectors of the other state's
    compression so that only the joint kernel stays a single outcome.

    Raises:
        FidelityNotPreserved: if the Bhattacharyya overlap of the outcome laws
            misses the quantum fidelity by more than ``FIDELITY_CHECK_TOL``.
    """
    if rho0.dim != rho1.dim:
        raise DimensionMismatch(f"dimensions {rho0.dim} and {rho1.dim} differ")
    builders = [_anchored_basis]
    if min(rho0.rank, rho1.rank) < rho0.dim:
        builders.insert(0, _difference_basis)

    target = fidelity(rho0, rho1)
    balanced = BinaryEnsemble(0.5, rho0, rho1)
    miss = 0.0
    for build in builders:
        povm = build(rho0, rho1)
        achieved = classical_fidelity(induce_channel(balanced, povm))
        miss = abs(achieved - target)
        if miss <= FIDELITY_CHECK_TOL:
            return povm
        LOGGER.debug("%s misses the fidelity by %.3e", build.__name__, miss)
    raise FidelityNotPreserved(
        f"outcome overlap misses fidelity {target:.12g} by {miss:.3e}"
    )


def helstrom_measurement(e: BinaryEnsemble) -> Povm:
    gamma = e.p * e.rho0.matrix - (1.0 - e.p) * e.rho1.matrix
    return _orthogonal(matcore.hermitian_eig(gamma).eigenvectors, "helstrom")


def pretty_good_measurement(e: BinaryEnsemble) -> Povm:
    """Square-root measurement; trivial one-outcome POVM when p is 0 or 1."""
    d = e.dim
    if e.p in (0.0, 1.0):
        return Povm([np.eye(d)], label="pgm")
    avg = average_state(e).matrix
    r = matcore.inv_sqrtm_psd(avg)
    elements = [
        _hermitian_part(e.p * r @ e.rho0.matrix @ r),
        _hermitian_part((1.0 - e.p) * r @ e.rho1.matrix @ r),
    ]
    kernel = np.eye(d) - matcore.support_projector(avg)
    if np.max(np.abs(kernel)) > KERNEL_WEIGHT:
        elements.append(kernel)
    return Povm(elements, label="pgm")


def common_eigenbasis_measurement(e: BinaryEnsemble) -> Povm:
    """Orthogonal measurement diagonalizing both states at once.

    Raises:
        NotCommuting: if ``max|[rho0, rho1]|`` exceeds ``COMMUTING_TOL``.
    """
    gap = matcore.commutator_norm(e.rho0.matrix, e.rho1.matrix)
    if gap > COMMUTING_TOL:
        raise NotCommuting(f"max|[rho0, rho1]| = {gap:.3e} exceeds {COMMUTING_TOL:g}")
    w = e.rho0.spectrum.eigenvalues
    v = e.rho0.spectrum.eigenvectors
    columns = []
    start = 0
    # refine each degenerate eigenspace of rho0 by rho1
    for end in range(1, len(w) + 1):
        if end < len(w) and w[end] - w[end - 1] <= 1e-9:
            continue
        block = v[:, start:end]
        if block.shape[1] > 1:
            block = block @ matcore.hermitian_eig(block.conj().T @ e.rho1.matrix @ block).eigenvectors
        columns.append(block)
        start = end
    return _orthogonal(np.hstack(columns), "common_eigenbasis")


def random_orthogonal_measurement(d: int, seed: int) -> Povm:
    return _orthogonal(matcore.haar_unitary(d, seed), "random_orthogonal")


def povm_vectors(m: Povm) -> np.ndarray:
    """Rank-one factors ``sqrt(l) v`` of every element, one per row (``K x d``)."""
    columns = []
    for elem in m:
        eig = matcore.hermitian_eig(elem)
        keep = eig.eigenvalues > KERNEL_WEIGHT
        columns.append(eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep]))
    return np.hstack(columns).T


def conjugate_povm(m: Povm, u: np.ndarray) -> Povm:
    return Povm([u @ elem @ u.conj().T for elem in m], label=m.label)


def conjugate_ensemble(e: BinaryEnsemble, u: np.ndarray) -> BinaryEnsemble:
    return BinaryEnsemble(
        e.p,
        DensityMatrix(u @ e.rho0.matrix @ u.conj().T),
        DensityMatrix(u @ e.rho1.matrix @ u.conj().T),
    )


def spectral_ensemble_information(rho: DensityMatrix, m: Povm) -> float:
    """Information between the eigen-index of ``rho`` and the outcome of ``m``.

    Its average over Haar-random orthogonal measurements is ``Q(rho)``.
    """
    if rho.dim != m.dim:
        raise DimensionMismatch(f"state dimension {rho.dim}, POVM dimension {m.dim}")
    lam = np.clip(rho.spectrum.eigenvalues, 0.0, None)
    v = rho.spectrum.eigenvectors
    # cond[k, m] = <v_k| E_m |v_k>
    cond = np.einsum("ik,mij,jk->km", v.conj(), m.stack, v).real.clip(0.0, None)
    marginal = lam @ cond
    return max(0.0, shannon_entropy(marginal) - sum(
        lk * shannon_entropy(row) for lk, row in zip(lam, cond) if lk > 0.0
    ))
