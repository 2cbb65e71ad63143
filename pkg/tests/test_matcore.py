import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src import matcore
from src.errors import DomainError, InvalidMatrix, NotHermitian


def random_hermitian(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return a + a.conj().T


def test_eig_of_diagonal_is_sorted():
    eig = matcore.hermitian_eig(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(eig.eigenvalues, [-1.0, 2.0, 3.0])
    assert np.allclose(eig.reconstruct(), np.diag([3.0, -1.0, 2.0]))


@settings(max_examples=40, deadline=None)
@given(d=st.integers(min_value=1, max_value=6), seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_eig_reconstructs_and_is_unitary(d, seed):
    h = random_hermitian(d, seed)
    eig = matcore.hermitian_eig(h)
    v = eig.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10)
    assert np.allclose(eig.reconstruct(), h, atol=1e-10)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.allclose(eig.eigenvalues, np.linalg.eigvalsh(h), atol=1e-10)


def test_eig_is_bit_reproducible():
    h = random_hermitian(4, 11)
    a = matcore.hermitian_eig(h)
    b = matcore.hermitian_eig(h.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        matcore.hermitian_eig([[1.0, 1.0], [0.0, 1.0]])


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.ones(3), [[np.nan, 0.0], [0.0, 1.0]], np.zeros((0, 0))])
def test_rejects_malformed_matrices(bad):
    with pytest.raises(InvalidMatrix):
        matcore.as_matrix(bad)


def test_sqrt_squares_back():
    h = random_hermitian(3, 5)
    rho = h @ h
    root = matcore.sqrtm_psd(rho)
    assert np.allclose(root @ root, rho, atol=1e-9)
    assert matcore.hermiticity_error(root) < 1e-12


def test_inverse_sqrt_is_pseudo_inverse_on_support():
    rho = np.diag([0.5, 0.5, 0.0])
    r = matcore.inv_sqrtm_psd(rho)
    assert np.allclose(r, np.diag([np.sqrt(2), np.sqrt(2), 0.0]))
    assert np.allclose(r @ rho @ r, matcore.support_projector(rho))


def test_spectral_map_outside_domain():
    with pytest.raises(DomainError):
        matcore.spectral_map(np.diag([-1.0, 1.0]), np.log)


def test_psd_map_drops_rounding_negatives():
    h = np.diag([1.0, -1e-14])
    assert np.allclose(matcore.psd_map(h, np.log), np.diag([0.0, 0.0]))


def test_trace_norm():
    assert matcore.trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0)
    assert matcore.trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)


def test_commutator_norm():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0])
    assert matcore.commutator_norm(x, z) == pytest.approx(2.0)
    assert matcore.commutator_norm(z, np.diag([3.0, 4.0])) == 0.0


def test_derive_seed():
    assert matcore.derive_seed(1, 2) == matcore.derive_seed(1, 2)
    assert matcore.derive_seed(1, 2) != matcore.derive_seed(1, 3)
    assert matcore.derive_seed(1, 2) != matcore.derive_seed(2, 1)
    with pytest.raises(DomainError):
        matcore.derive_seed(-1)


@pytest.mark.parametrize("d", [1, 2, 5])
def test_haar_unitary(d):
    u = matcore.haar_unitary(d, 42)
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-12)
    assert np.array_equal(u, matcore.haar_unitary(d, 42))
    with pytest.raises(DomainError):
        matcore.haar_unitary(0, 42)
