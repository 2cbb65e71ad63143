"""Dense complex Hermitian linear algebra for small dimensions.

The eigensolver is a cyclic Jacobi iteration rather than LAPACK so that
results are bit-reproducible for a given input, independent of the BLAS the
interpreter happens to link against. Dimensions are expected to stay below
~16; nothing here is tuned for large matrices.
"""

from dataclasses import dataclass
from typing import Callable, Optional
import logging

import numpy as np
import scipy.linalg

from .errors import DomainError, InvalidMatrix, NotHermitian

LOGGER = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
# relative to the largest |eigenvalue|
PSEUDO_THRESHOLD = 1e-10

SpectralFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and the unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square complex128 array, checking shape and finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has NaN or infinite entries")
    return m


def hermiticity_error(a) -> float:
    m = as_matrix(a)
    return float(np.max(np.abs(m - m.conj().T)))


def commutator_norm(a, b) -> float:
    """Max-entry norm of ``ab - ba``."""
    x, y = as_matrix(a), as_matrix(b)
    return float(np.max(np.abs(x @ y - y @ x)))


def _max_off_diagonal(a: np.ndarray) -> float:
    n = a.shape[0]
    if n < 2:
        return 0.0
    return float(np.max(np.abs(a[~np.eye(n, dtype=bool)])))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p, q] with a complex Givens rotation, in place."""
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = np.conj(apq / r)
    theta = 0.5 * np.arctan2(2.0 * r, a[q, q].real - a[p, p].real)
    c, s = np.cos(theta), np.sin(theta)
    # phase removal followed by a real rotation in the (p, q) plane
    g = np.array([[c, s], [-s * phase, c * phase]], dtype=complex)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def hermitian_eig(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Raises:
        NotHermitian: if ``max|H - H^dagger|`` exceeds ``HERMITIAN_TOL``.
    """
    m = as_matrix(h)
    err = hermiticity_error(m)
    if err > HERMITIAN_TOL:
        raise NotHermitian(f"max|H - H^dagger| = {err:.3e} exceeds {HERMITIAN_TOL:g}")
    a = 0.5 * (m + m.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    tol = JACOBI_TOL * max(1.0, float(np.max(np.abs(a))))

    for sweep in range(JACOBI_MAX_SWEEPS):
        if _max_off_diagonal(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    else:
        LOGGER.warning(
            "Jacobi did not converge after %d sweeps (off-diagonal %.3e)",
            JACOBI_MAX_SWEEPS,
            _max_off_diagonal(a),
        )

    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])


def _default_threshold(w: np.ndarray) -> float:
    return PSEUDO_THRESHOLD * float(np.max(np.abs(w))) if w.size else 0.0


def _apply(eig: EigenDecomposition, f: SpectralFunction, keep: np.ndarray) -> np.ndarray:
    w = eig.eigenvalues
    fw = np.zeros_like(w)
    if np.any(keep):
        with np.errstate(all="ignore"):
            vals = np.asarray(f(w[keep]), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = w[keep][~np.isfinite(vals)]
            raise DomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
        fw[keep] = vals
    v = eig.eigenvectors
    return (v * fw) @ v.conj().T


def spectral_map(h, f: SpectralFunction, threshold: Optional[float] = None) -> np.ndarray:
    """Return ``V f(L) V^dagger``; eigenvalues with ``|l| <= threshold`` map to 0.

    ``f`` receives a 1-D array of the retained eigenvalues (numpy ufuncs such
    as ``np.sqrt`` work directly). ``threshold=None`` means ``PSEUDO_THRESHOLD``
    times the largest eigenvalue magnitude.
    """
    eig = hermitian_eig(h)
    thr = _default_threshold(eig.eigenvalues) if threshold is None else threshold
    return _apply(eig, f, np.abs(eig.eigenvalues) > thr)


def psd_map(h, f: SpectralFunction, threshold: Optional[float] = None) -> np.ndarray:
    """Pseudo-function on the support of a positive semidefinite matrix.

    Like ``spectral_map`` but rounding-level negative eigenvalues are treated
    as kernel too, so ``psd_map(rho, lambda x: x ** -0.5)`` is the
    pseudo-inverse square root.
    """
    eig = hermitian_eig(h)
    thr = _default_threshold(eig.eigenvalues) if threshold is None else threshold
    return _apply(eig, f, eig.eigenvalues > thr)


def sqrtm_psd(h) -> np.ndarray:
    return psd_map(h, np.sqrt)


def inv_sqrtm_psd(h, threshold: Optional[float] = None) -> np.ndarray:
    return psd_map(h, lambda x: x ** -0.5, threshold)


def support_projector(h, threshold: Optional[float] = None) -> np.ndarray:
    return psd_map(h, np.ones_like, threshold)


def trace_norm(a) -> float:
    """Sum of singular values, ``Tr sqrt(A^dagger A)``."""
    return float(np.linalg.svd(as_matrix(a), compute_uv=False).sum())


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed for (seed, keys...)."""
    if seed < 0 or any(k < 0 for k in keys):
        raise DomainError(f"seeds must be non-negative, got {(seed,) + keys}")
    state = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def haar_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random ``d x d`` unitary from the QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are folded back into ``Q`` so the distribution is
    exactly Haar rather than QR-convention dependent.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))
