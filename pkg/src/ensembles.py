"""Density matrices, binary ensembles and the ensemble families used in the figures.

JSON layout shared with the CLI::

    {"p": 0.5,
     "rho0": [[[re, im], [re, im]], [[re, im], [re, im]]],
     "rho1": ...}

Extra top-level keys are ignored on load, so counterexample dumps (which also
carry the failing property and its margin) reload unchanged.
"""

from dataclasses import dataclass
from functools import cached_property
from numbers import Real
from typing import Any, Dict, List, Optional, Sequence, Tuple
import json
import logging
import os

import numpy as np

from . import matcore
from .errors import (
    DimensionMismatch,
    DomainError,
    EnsembleFormatError,
    NotHermitian,
    NotPositive,
    TraceNotOne,
)

LOGGER = logging.getLogger(__name__)

DENSITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Build through ``validate_density`` or one of the generators; the
    constructor itself does not re-check the invariants.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> matcore.EigenDecomposition:
        return matcore.hermitian_eig(self.matrix)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return matcore.sqrtm_psd(self.matrix)

    @property
    def rank(self) -> int:
        w = self.spectrum.eigenvalues
        return int(np.sum(w > matcore.PSEUDO_THRESHOLD * max(w.max(), 0.0)))


@dataclass(frozen=True, eq=False)
class BinaryEnsemble:
    """``{(p, rho0), (1 - p, rho1)}``."""

    p: float
    rho0: DensityMatrix
    rho1: DensityMatrix

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"prior p = {self.p!r} outside [0, 1]")
        if self.rho0.dim != self.rho1.dim:
            raise DimensionMismatch(
                f"rho0 has dimension {self.rho0.dim}, rho1 has {self.rho1.dim}"
            )

    @property
    def dim(self) -> int:
        return self.rho0.dim

    def with_prior(self, p: float) -> "BinaryEnsemble":
        return BinaryEnsemble(p, self.rho0, self.rho1)


def validate_density(m) -> DensityMatrix:
    """Check the density-matrix invariants and wrap ``m``.

    Raises:
        NotHermitian, NotPositive, TraceNotOne: with the measured violation.
    """
    a = matcore.as_matrix(m)
    herr = matcore.hermiticity_error(a)
    if herr > DENSITY_TOL:
        raise NotHermitian(f"max|rho - rho^dagger| = {herr:.3e} exceeds {DENSITY_TOL:g}")
    a = 0.5 * (a + a.conj().T)
    lowest = float(matcore.hermitian_eig(a).eigenvalues[0])
    if lowest < -DENSITY_TOL:
        raise NotPositive(f"smallest eigenvalue {lowest:.3e} is below -{DENSITY_TOL:g}")
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > DENSITY_TOL:
        raise TraceNotOne(f"trace {tr:.12g} differs from 1 by {abs(tr - 1.0):.3e}")
    return DensityMatrix(a)


def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    v = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise DomainError("cannot build a pure state from the zero vector")
    v = v / norm
    return DensityMatrix(np.outer(v, v.conj()))


def average_state(e: BinaryEnsemble) -> DensityMatrix:
    """``p rho0 + (1 - p) rho1``."""
    return DensityMatrix(e.p * e.rho0.matrix + (1.0 - e.p) * e.rho1.matrix)


def pure_pair(theta: float, p: float) -> BinaryEnsemble:
    """Qubit pair ``|0>`` and ``cos(theta)|0> + sin(theta)|1>``; overlap ``cos(theta)``."""
    if not (-1e-12 <= theta <= np.pi / 2 + 1e-12):
        raise DomainError(f"angle {theta!r} outside [0, pi/2]")
    return BinaryEnsemble(
        p,
        pure_state([1.0, 0.0]),
        pure_state([np.cos(theta), np.sin(theta)]),
    )


def figure3_ensemble(p: float) -> BinaryEnsemble:
    """Mixed qutrit ``diag(0.01, 0.01, 0.98)`` against a nearly-|1> pure state."""
    rho0 = DensityMatrix(np.diag([0.01, 0.01, 0.98]))
    v = np.array([np.sqrt(0.02), np.sqrt(0.96), np.sqrt(0.02)])
    return BinaryEnsemble(p, rho0, pure_state(v))


def _random_state(d: int, rank: int, seed: int) -> DensityMatrix:
    rng = np.random.default_rng(matcore.derive_seed(seed, 0))
    # normalized exponentials: flat Dirichlet over the rank-simplex
    w = rng.exponential(size=rank)
    w = w / w.sum()
    u = matcore.haar_unitary(d, matcore.derive_seed(seed, 1))[:, :rank]
    return validate_density((u * w) @ u.conj().T)


def random_ensemble(d: int, ranks: Tuple[int, int], p: float, seed: int) -> BinaryEnsemble:
    """Two independent random states of the given ranks, deterministic per seed."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    for r in ranks:
        if not (1 <= r <= d):
            raise DomainError(f"rank {r} outside [1, {d}]")
    return BinaryEnsemble(
        p,
        _random_state(d, ranks[0], matcore.derive_seed(seed, 0)),
        _random_state(d, ranks[1], matcore.derive_seed(seed, 1)),
    )


def commuting_ensemble(d: int, p: float, seed: int) -> BinaryEnsemble:
    """Two full-rank states diagonal in one Haar-random basis."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(matcore.derive_seed(seed, 3))
    u = matcore.haar_unitary(d, matcore.derive_seed(seed, 2))
    states = []
    for _ in range(2):
        w = rng.exponential(size=d)
        w = w / w.sum()
        states.append(validate_density((u * w) @ u.conj().T))
    return BinaryEnsemble(p, states[0], states[1])


# --- JSON -----------------------------------------------------------------


def _matrix_from_json(rows: Any, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise EnsembleFormatError(f"'{name}' must be a non-empty array of rows")
    out: List[List[complex]] = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(rows):
            raise EnsembleFormatError(f"'{name}' row {i} must have {len(rows)} entries")
        parsed = []
        for j, entry in enumerate(row):
            ok = (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(x, Real) and not isinstance(x, bool) for x in entry)
            )
            if not ok:
                raise EnsembleFormatError(f"'{name}'[{i}][{j}] must be a [re, im] pair of numbers")
            parsed.append(complex(entry[0], entry[1]))
        out.append(parsed)
    return np.array(out, dtype=complex)


def _matrix_to_json(m: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def ensemble_from_dict(data: Any) -> BinaryEnsemble:
    if not isinstance(data, dict):
        raise EnsembleFormatError("ensemble JSON root must be an object")
    for key in ("p", "rho0", "rho1"):
        if key not in data:
            raise EnsembleFormatError(f"missing field '{key}'")
    p = data["p"]
    if not isinstance(p, Real) or isinstance(p, bool):
        raise EnsembleFormatError("'p' must be a number")
    rho0 = validate_density(_matrix_from_json(data["rho0"], "rho0"))
    rho1 = validate_density(_matrix_from_json(data["rho1"], "rho1"))
    return BinaryEnsemble(float(p), rho0, rho1)


def ensemble_to_dict(e: BinaryEnsemble, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "p": float(e.p),
        "rho0": _matrix_to_json(e.rho0.matrix),
        "rho1": _matrix_to_json(e.rho1.matrix),
    }
    if extra:
        out.update(extra)
    return out


def load_ensemble(path: str) -> BinaryEnsemble:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise EnsembleFormatError(f"{path}: not valid JSON ({exc})") from exc
    return ensemble_from_dict(data)


def dump_ensemble(e: BinaryEnsemble, path: str, extra: Optional[Dict[str, Any]] = None) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(ensemble_to_dict(e, extra), f, indent=2)
