import math
from dataclasses import replace

import numpy as np
import pytest

from src import matcore
from src.accinfo import (
    OptimizerConfig,
    canonicalize_povm,
    optimize_accessible_information,
    qubit_projective_grid,
)
from src.ensembles import BinaryEnsemble, average_state, figure3_ensemble, pure_pair, random_ensemble
from src.errors import ConfigError, DegenerateInput, DimensionMismatch, DomainError
from src.measurements import (
    Povm,
    fidelity_preserving_measurement,
    helstrom_measurement,
    induce_channel,
    measured_information,
    pretty_good_measurement,
)
from src.measures import binary_entropy, holevo_chi, subentropy


def helstrom_information(e):
    return measured_information(e, helstrom_measurement(e))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"outcomes": 1},
        {"restarts": 0},
        {"max_iterations": 0},
        {"step_tolerance": 0.0},
        {"seed": -1},
        {"n_jobs": 0},
        {"initial_step": 1e-12},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        OptimizerConfig(**kwargs)


def test_outcomes_default_to_d_squared():
    assert OptimizerConfig().outcomes_for(3) == 9
    assert OptimizerConfig().outcomes_for(1) == 2
    assert OptimizerConfig(outcomes=2).outcomes_for(3) == 2


def test_canonicalize_standard_basis():
    m = canonicalize_povm(np.eye(3))
    assert len(m) == 3
    for i, elem in enumerate(m):
        expected = np.zeros((3, 3))
        expected[i, i] = 1.0
        assert np.allclose(elem, expected)


def test_canonicalize_scale_invariant():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    m1 = canonicalize_povm(a)
    m2 = canonicalize_povm(3.7 * a)
    assert all(np.allclose(x, y, atol=1e-12) for x, y in zip(m1, m2))
    assert np.max(np.abs(sum(m1) - np.eye(2))) <= 1e-9


def test_canonicalize_adds_kernel_outcome():
    m = canonicalize_povm([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    assert len(m) == 3
    assert np.allclose(m.elements[0], np.diag([0.2, 0.0, 0.0]))
    assert np.allclose(m.elements[2], np.diag([0.0, 1.0, 1.0]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_canonicalize_agrees_with_jacobi_inverse_root(d):
    rng = np.random.default_rng(d)
    a = rng.standard_normal((d * d, d)) + 1j * rng.standard_normal((d * d, d))
    m = canonicalize_povm(a)
    b = a @ matcore.inv_sqrtm_psd(a.T @ a.conj()).T
    assert len(m) == d * d
    for v, elem in zip(b, m):
        assert np.allclose(elem, np.outer(v, v.conj()), atol=1e-10)
    assert np.max(np.abs(sum(m) - np.eye(d))) <= 1e-9


def test_canonicalize_rejects_zero_vectors():
    with pytest.raises(DegenerateInput):
        canonicalize_povm(np.zeros((3, 2)))


def test_canonicalize_fixes_rank_one_povm():
    # trine POVM: already canonical
    angles = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
    a = np.array([[math.cos(t), math.sin(t)] for t in angles]) * math.sqrt(2.0 / 3.0)
    m = canonicalize_povm(a)
    for v, elem in zip(a, m):
        assert np.allclose(elem, np.outer(v, v))


def test_orthogonal_states(orthogonal_pair, fast_config):
    r = optimize_accessible_information(orthogonal_pair, fast_config)
    assert r.value == pytest.approx(1.0, abs=1e-6)


def test_identical_states(fast_config):
    e = random_ensemble(3, (2, 2), 0.4, 8)
    same = BinaryEnsemble(0.4, e.rho0, e.rho0)
    assert optimize_accessible_information(same, fast_config).value == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_trivial_prior(p, fast_config):
    r = optimize_accessible_information(pure_pair(0.7, p), fast_config)
    assert r.value == 0.0
    assert len(r.best_povm) == 1
    assert r.iterations_used == 0


def test_pure_pair_pi_over_4(fast_config):
    e = pure_pair(math.pi / 4, 0.5)
    expected = 1.0 - binary_entropy((1.0 + math.sin(math.pi / 4)) / 2.0)
    r = optimize_accessible_information(e, fast_config)
    assert r.value == pytest.approx(expected, abs=1e-3)
    assert r.value == pytest.approx(qubit_projective_grid(e, 200), abs=1e-3)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_result_sandwiched_by_named_measurements_and_chi(seed, fast_config):
    e = random_ensemble(2, (2, 1), 0.35, seed)
    r = optimize_accessible_information(e, fast_config)
    named = [
        measured_information(e, fidelity_preserving_measurement(e.rho0, e.rho1)),
        helstrom_information(e),
        measured_information(e, pretty_good_measurement(e)),
    ]
    assert r.value >= max(named) - 1e-8
    assert r.value <= holevo_chi(e) + 1e-8
    assert r.value == pytest.approx(measured_information(e, r.best_povm), abs=1e-12)
    assert qubit_projective_grid(e, 60) <= r.value + 1e-6


def test_strict_gap_for_mixed_qutrits(fast_config):
    e = figure3_ensemble(0.5)
    r = optimize_accessible_information(e, fast_config)
    assert r.value < holevo_chi(e) - 1e-3


@pytest.mark.parametrize("ranks", [(1, 1), (1, 2)])
@pytest.mark.parametrize("p", [0.3, 0.5])
def test_strict_gap_for_noncommuting_qubits(ranks, p, fast_config):
    checked = 0
    for seed in range(6):
        e = random_ensemble(2, ranks, p, seed)
        if matcore.commutator_norm(e.rho0.matrix, e.rho1.matrix) <= 1e-2:
            continue
        r = optimize_accessible_information(e, fast_config)
        assert r.value <= holevo_chi(e) - 1e-4
        checked += 1
    assert checked > 0


def test_seed_determinism(fast_config):
    e = random_ensemble(2, (2, 2), 0.6, 21)
    a = optimize_accessible_information(e, fast_config)
    b = optimize_accessible_information(e, fast_config)
    assert a.value == b.value
    assert a.restart_values == b.restart_values


def test_parallel_merge_matches_serial(fast_config):
    e = random_ensemble(2, (1, 2), 0.45, 4)
    serial = optimize_accessible_information(e, fast_config)
    cfg = replace(fast_config, n_jobs=2)
    parallel = optimize_accessible_information(e, cfg)
    assert parallel.value == serial.value
    assert parallel.best_restart == serial.best_restart


def test_restart_concordance(fast_config):
    e = pure_pair(math.pi / 3, 0.5)
    r = optimize_accessible_information(e, fast_config)
    agreeing = sum(1 for v in r.restart_values if r.value - v <= 1e-6)
    assert agreeing >= 0.25 * len(r.restart_values)
    assert 1 <= r.restarts_agreeing <= len(r.restart_values)


@pytest.mark.parametrize("theta", [0.1, 0.6, 1.0, 1.4])
def test_two_outcomes_suffice_for_equal_prior_pure_qubits(theta, fast_config):
    e = pure_pair(theta, 0.5)
    full = optimize_accessible_information(e, fast_config)
    two = optimize_accessible_information(e, replace(fast_config, outcomes=2))
    assert full.value == pytest.approx(helstrom_information(e), abs=1e-3)
    assert two.value == pytest.approx(helstrom_information(e), abs=1e-3)
    assert full.value == pytest.approx(qubit_projective_grid(e, 400), abs=1e-3)


def test_value_above_subentropy_for_pure_ensembles(fast_config):
    e = pure_pair(1.1, 0.3)
    r = optimize_accessible_information(e, fast_config)
    assert r.value >= subentropy(average_state(e)) - 5e-3


def test_grid_values(orthogonal_pair):
    assert qubit_projective_grid(orthogonal_pair, 200) >= 1.0 - 1e-4
    same = BinaryEnsemble(0.5, orthogonal_pair.rho0, orthogonal_pair.rho0)
    assert qubit_projective_grid(same, 50) == pytest.approx(0.0, abs=1e-12)
    e = pure_pair(math.pi / 3, 0.5)
    assert qubit_projective_grid(e, 400) == pytest.approx(helstrom_information(e), abs=1e-4)


def test_grid_nested_resolutions_are_monotone():
    e = random_ensemble(2, (2, 2), 0.3, 13)
    values = [qubit_projective_grid(e, r) for r in (5, 9, 17, 33)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_grid_errors():
    with pytest.raises(DimensionMismatch):
        qubit_projective_grid(figure3_ensemble(0.5), 10)
    with pytest.raises(DomainError):
        qubit_projective_grid(pure_pair(0.3, 0.5), 1)


def test_grid_matches_direct_measurement():
    # the z axis is on every grid; compare with the computational basis
    e = random_ensemble(2, (2, 1), 0.5, 2)
    z = Povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert qubit_projective_grid(e, 3) >= measured_information(e, z) - 1e-12
    c = induce_channel(e, z)
    assert np.isclose(c.q.sum(), 1.0)
