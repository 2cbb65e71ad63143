import math

import pytest

from src.accinfo import OptimizerConfig
from src.errors import ConfigError
from src.properties import (
    PROPERTIES,
    FuzzSpec,
    FuzzSummary,
    PropertySummary,
    make_case,
    run_case,
    run_fuzz,
    summarize,
)

QUICK = OptimizerConfig(restarts=2, max_iterations=60, step_tolerance=1e-6)


def test_registry_names():
    assert set(PROPERTIES) == {
        "holevo_bound",
        "lanford_robinson",
        "theorem_sandwich",
        "fidelity_preserved",
        "fidelity_data_processing",
        "corollary_chi_cap",
        "dacunha_castelle",
        "relative_entropy_identity",
        "subentropy_cap",
        "jrw_below_holevo",
        "fact1_gap",
        "lemma_ub2_commuting",
        "commuting_equality",
        "measurement_invariance",
    }


@pytest.mark.parametrize(
    "kwargs",
    [{"count": 0}, {"dim": 1}, {"dim": 9}, {"ranks": (0, 1)}, {"ranks": (1, 3)}, {"seed": -2}, {"n_jobs": 0}],
)
def test_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        FuzzSpec(**kwargs)


def test_make_case_is_deterministic():
    spec = FuzzSpec(count=3, dim=3, seed=11, optimizer=QUICK)
    a, b = make_case(spec, 2), make_case(spec, 2)
    assert a.seed == b.seed
    assert a.ensemble.p == b.ensemble.p
    assert (a.ensemble.rho0.matrix == b.ensemble.rho0.matrix).all()
    assert make_case(spec, 1).seed != a.seed


def test_fixed_ranks():
    case = make_case(FuzzSpec(dim=3, ranks=(1, 3), optimizer=QUICK), 0)
    assert (case.ensemble.rho0.rank, case.ensemble.rho1.rank) == (1, 3)


@pytest.mark.parametrize("index", [0, 1, 2])
def test_every_property_holds_on_random_qubits(index):
    margins = run_case(make_case(FuzzSpec(dim=2, seed=5, optimizer=QUICK), index))
    assert set(margins) == set(PROPERTIES)
    for name, margin in margins.items():
        assert margin is None or margin >= 0.0, name


def test_identical_states_case():
    case = make_case(FuzzSpec(dim=3, identical=True, optimizer=QUICK), 0)
    assert case.report.chi == pytest.approx(0.0, abs=1e-12)
    assert case.report.i_acc_est == pytest.approx(0.0, abs=1e-9)
    margins = run_case(case)
    assert all(m is None or m >= 0.0 for m in margins.values())


def test_chi_offset_breaks_relative_entropy_identity():
    case = make_case(FuzzSpec(dim=2, chi_offset=0.1, optimizer=QUICK), 0)
    margins = run_case(case)
    assert margins["relative_entropy_identity"] == pytest.approx(1e-9 - 0.1, abs=1e-6)


def test_summarize_counts_and_worst():
    results = [
        {"holevo_bound": 0.2, "fact1_gap": None},
        {"holevo_bound": -0.05, "fact1_gap": 0.1},
        {"holevo_bound": -0.3, "fact1_gap": 0.0},
    ]
    summary = summarize(results)
    hb = summary.properties["holevo_bound"]
    assert (hb.passed, hb.failed, hb.skipped) == (1, 2, 0)
    assert hb.worst_margin == -0.3 and hb.worst_case == 2
    gap = summary.properties["fact1_gap"]
    assert (gap.passed, gap.skipped) == (2, 1)
    assert not summary.ok
    assert summary.first_failure() == ("holevo_bound", 2, -0.3)
    # unobserved properties are reported with empty counts
    assert summary.properties["subentropy_cap"].to_dict()["worst_margin"] is None


def test_summary_dict():
    summary = FuzzSummary(cases=1, properties={"holevo_bound": PropertySummary(passed=1, worst_margin=0.5, worst_case=0)})
    d = summary.to_dict()
    assert d["ok"] is True
    assert d["properties"]["holevo_bound"]["worst_margin"] == 0.5
    assert summary.first_failure() is None


def test_run_fuzz_passes():
    summary = run_fuzz(FuzzSpec(count=3, dim=2, seed=2, optimizer=QUICK))
    assert summary.cases == 3
    assert summary.ok
    for s in summary.properties.values():
        assert s.passed + s.skipped == 3


def test_run_fuzz_reports_injected_failure():
    summary = run_fuzz(FuzzSpec(count=2, dim=2, chi_offset=0.1, optimizer=QUICK, n_jobs=2))
    assert not summary.ok
    name, index, margin = summary.first_failure()
    assert margin < 0.0
    assert index in (0, 1)
    assert summary.properties["relative_entropy_identity"].failed == 2
    assert math.isfinite(margin)
