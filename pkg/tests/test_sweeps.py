import io
import math

import numpy as np
import pytest

from src.ensembles import figure3_ensemble
from src.errors import ConfigError
from src.sweeps import (
    CSV_COMMENT,
    CSV_HEADER,
    SweepSpec,
    ensemble_at,
    plot_script,
    row_fields,
    sweep_rows,
    write_csv,
)


def render(rows):
    out = io.StringIO()
    write_csv(rows, out)
    return out.getvalue()


def test_default_grid():
    grid = SweepSpec().grid()
    assert len(grid) == 101
    assert grid[0] == 0.0 and grid[-1] == 1.0
    theta = SweepSpec(family="figure2", grid_steps=5).grid()
    assert theta[-1] == pytest.approx(math.pi / 2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "figure4"},
        {"grid_steps": 1},
        {"family": "custom"},
        {"grid_start": -0.5},
        {"family": "figure2", "grid_end": 2.0},
        {"n_jobs": 0},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        SweepSpec(**kwargs)


def test_ensemble_at_families():
    assert ensemble_at(SweepSpec(family="figure1"), 0.3).p == 0.3
    assert ensemble_at(SweepSpec(family="figure2"), 0.4).p == 0.5
    assert ensemble_at(SweepSpec(family="figure3"), 0.2).dim == 3
    custom = SweepSpec(family="custom", ensemble=figure3_ensemble(0.5))
    assert ensemble_at(custom, 0.8).p == 0.8


def test_csv_layout(fast_config):
    rows = sweep_rows(SweepSpec(family="figure1", grid_steps=3, optimizer=fast_config))
    lines = render(rows).splitlines()
    assert lines[0] == CSV_COMMENT
    assert lines[0].startswith("#")
    assert lines[1] == CSV_HEADER
    assert len(lines) == 5
    for line in lines[2:]:
        fields = line.split(",")
        assert len(fields) == len(CSV_HEADER.split(","))
        assert fields[-1] in ("true", "false")
    assert lines[2].split(",")[0] == "0"
    assert lines[3].split(",")[0] == "0.5"


def test_fields_fold_negative_zero(fast_config):
    rows = sweep_rows(SweepSpec(family="figure1", grid_steps=2, optimizer=fast_config))
    fields = row_fields(rows[0])
    assert "-0" not in fields
    assert all(f == format(float(f), ".12g") for f in fields[:-1])


def test_figure2_endpoints(fast_config):
    rows = sweep_rows(SweepSpec(family="figure2", grid_steps=2, optimizer=fast_config))
    first, last = rows[0].report, rows[1].report
    for value in (first.chi, first.i_fid, first.i_helstrom, first.i_pgm, first.i_acc_est, first.t_max):
        assert value == pytest.approx(0.0, abs=1e-9)
    assert last.chi == pytest.approx(1.0, abs=1e-9)
    assert last.i_acc_est == pytest.approx(1.0, abs=1e-6)
    assert first.sandwich_ok and last.sandwich_ok


def test_figure1_rows_sandwich(fast_config):
    rows = sweep_rows(SweepSpec(family="figure1", grid_steps=5, optimizer=fast_config))
    assert [r.param for r in rows] == list(np.linspace(0.0, 1.0, 5))
    for row in rows:
        r = row.report
        assert r.sandwich_ok
        assert r.t_max <= r.i_pgm + 1e-6
        assert r.i_acc_est <= r.chi + 1e-8


def test_sweep_is_deterministic(fast_config):
    spec = SweepSpec(family="figure3", grid_steps=3, optimizer=fast_config)
    assert render(sweep_rows(spec)) == render(sweep_rows(spec))


def test_parallel_sweep_keeps_order(fast_config):
    serial = SweepSpec(family="figure2", grid_steps=4, optimizer=fast_config)
    parallel = SweepSpec(family="figure2", grid_steps=4, optimizer=fast_config, n_jobs=2)
    assert render(sweep_rows(serial)) == render(sweep_rows(parallel))


def test_plot_script():
    text = plot_script("data/figure2.csv", "figure2")
    assert "set datafile separator ','" in text
    assert "set output 'data/figure2.png'" in text
    assert "set xlabel 'theta'" in text
    assert text.count("skip 2") == 6
    assert "using 1:14" in text and "using 1:8" in text
    assert "set output 'x.svg'" in plot_script("a.csv", output="x.svg")
