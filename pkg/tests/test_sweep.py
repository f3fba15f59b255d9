import math

import numpy as np
import pytest

from conftest import make_config
from snailbudget.dynamics import simulate_gate
from snailbudget.params import SweepSettings
from snailbudget.sweep import (
    FidelityGrid,
    default_axes,
    emit_grid_csv,
    emit_heatmap_svg,
    fidelity_grid,
    grid_csv_text,
    heatmap_svg_text,
    min_delta_for_target,
    read_grid_csv,
)


def test_single_point_grid(iswap_config):
    g = fidelity_grid(iswap_config, [1.0], [150e6])
    r = simulate_gate(iswap_config, 1.0, 150e6)
    assert g.values.shape == (1, 1)
    assert g.values[0, 0] == r.avg_fidelity
    assert g.t_f == (r.t_f,)


def test_noiseless_row():
    cfg = make_config(t1_s=math.inf, spectator_model="off")
    g = fidelity_grid(cfg, [0.5], [10e6, 100e6, 1e9])
    assert np.all(g.values >= 1 - 1e-9)


def test_grid_matches_pointwise(iswap_config):
    etas, deltas = [0.5, 1.0], [150e6, 600e6]
    g = fidelity_grid(iswap_config, etas, deltas)
    for i, e in enumerate(etas):
        for j, d in enumerate(deltas):
            assert abs(g.values[i, j] - simulate_gate(iswap_config, e, d).avg_fidelity) <= 1e-12


def test_grid_independent_of_workers(iswap_config):
    etas, deltas = [0.3, 1.0, 2.0], [50e6, 400e6]
    serial = fidelity_grid(iswap_config, etas, deltas, workers=1)
    pooled = fidelity_grid(iswap_config, etas, deltas, workers=2)
    assert np.array_equal(serial.values, pooled.values)
    assert serial.t_f == pooled.t_f


def test_axes_validated(iswap_config):
    with pytest.raises(ValueError):
        fidelity_grid(iswap_config, [], [1e8])
    with pytest.raises(ValueError):
        fidelity_grid(iswap_config, [2.0, 1.0], [1e8])
    with pytest.raises(ValueError):
        fidelity_grid(iswap_config, [1.0], [-1e8])


def test_default_axes():
    eta, delta = default_axes(SweepSettings())
    assert len(eta) == 40 and len(delta) == 40
    assert eta[0] == pytest.approx(0.05) and eta[-1] == pytest.approx(4.0)
    assert delta[0] == pytest.approx(10e6) and delta[-1] == pytest.approx(1e9)
    assert np.allclose(np.diff(np.log(eta)), np.log(eta[1] / eta[0]))


def test_min_delta_vacuous_and_unreachable(iswap_config):
    assert min_delta_for_target(iswap_config, 1.0, 0.0, 10e6, 1e9) == 10e6
    assert min_delta_for_target(iswap_config, 1.0, 1.0, 10e6, 1e9) is None
    with pytest.raises(ValueError):
        min_delta_for_target(iswap_config, 1.0, 0.9, 1e9, 10e6)


def test_min_delta_brackets_threshold(iswap_config):
    tol = 1e6
    d = min_delta_for_target(iswap_config, 1.0, 0.99, 1e6, 1e9, tol)
    assert d is not None and 0 < d < 1e9

    def F(x):
        return simulate_gate(iswap_config, 1.0, x).avg_fidelity

    assert F(d) >= 0.99
    assert F(d - tol) < 0.99
    assert F(d - 2 * tol) < 0.99
    assert F(d + tol) >= 0.99


def _small_grid():
    values = np.array([[0.95, 0.985, 0.992], [0.97, 0.995, 0.999]])
    return FidelityGrid((0.5, 1.0), (1e7, 1e8, 1e9), values, (1e-7, 5e-8), 0.99)


def test_csv_contract(tmp_path):
    g = _small_grid()
    path = tmp_path / "grid.csv"
    emit_grid_csv(g, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "eta,delta2_hz,fidelity,t_f_s"
    assert len(lines) == 7
    assert lines[1].startswith("0.5,10000000.0,0.95,")
    assert lines[4].startswith("1.0,10000000.0,")  # row-major: eta outer
    back = read_grid_csv(path)
    assert np.array_equal(back.values, g.values)
    assert back.eta_axis == g.eta_axis and back.delta_axis == g.delta_axis


def test_outputs_deterministic(tmp_path):
    g = _small_grid()
    a, b = tmp_path / "a", tmp_path / "b"
    for p in (a, b):
        emit_grid_csv(g, p.with_suffix(".csv"))
        emit_heatmap_svg(g, p.with_suffix(".svg"))
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
    assert a.with_suffix(".svg").read_bytes() == b.with_suffix(".svg").read_bytes()


def test_svg_contour_presence():
    g = _small_grid()
    svg = heatmap_svg_text(g)
    assert svg.startswith("<svg") and "<script" not in svg
    assert svg.count("<polyline") == 1
    assert svg.count("<rect") == 6
    above = FidelityGrid(g.eta_axis, g.delta_axis, np.full((2, 3), 0.999), g.t_f, 0.99)
    below = FidelityGrid(g.eta_axis, g.delta_axis, np.full((2, 3), 0.9), g.t_f, 0.99)
    assert "<polyline" not in heatmap_svg_text(above)
    assert "<polyline" not in heatmap_svg_text(below)


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_grid_csv(_small_grid(), tmp_path / "missing" / "grid.csv")
