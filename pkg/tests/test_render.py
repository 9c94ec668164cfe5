import numpy as np
import pytest

from holonome._render import heatmap_svg, series_svg
from holonome.errors import ValidationError
from holonome.experiments import ObservableSeries, SweepGrid


def _series(n):
    t = np.linspace(0.0, 1.0, n)
    return ObservableSeries(
        times=t, p1=np.cos(t), p2=np.sin(t), p3=0.5 * t, f=t**2, metadata={"gate": "NOT"}
    )


def _grid(values):
    values = np.asarray(values, dtype=float)
    return SweepGrid(
        kappa_values=np.geomspace(0.1, 1.0, values.shape[0]),
        gamma_values=np.geomspace(0.01, 0.1, values.shape[1]),
        fidelities=values,
        convention="angular",
        n_th=100.0,
        metadata={"gate": "NOT"},
    )


def test_series_svg_is_deterministic():
    a = series_svg(_series(20), title="demo")
    b = series_svg(_series(20), title="demo")
    assert a == b
    assert a.startswith("<svg")
    assert a.count("<polyline") == 4
    for label in (">P1<", ">P2<", ">P3<", ">F<"):
        assert label in a


def test_series_svg_single_point_uses_markers():
    svg = series_svg(_series(1))
    assert "<circle" in svg
    assert "<polyline" not in svg


def test_series_svg_rejects_empty():
    with pytest.raises(ValidationError):
        series_svg(_series(0))


def test_heatmap_svg_layout():
    svg = heatmap_svg(_grid([[0.9, 0.8], [0.7, 0.6], [0.65, 0.55]]), title="sweep")
    assert svg.startswith("<svg")
    # background + 6 cells + plot frame + 32 colorbar swatches + colorbar frame
    assert svg.count("<rect") == 1 + 3 * 2 + 1 + 32 + 1
    assert "kappa (rad/us)" in svg
    assert "gamma_m (rad/us)" in svg


def test_heatmap_svg_flat_grid_does_not_divide_by_zero():
    svg = heatmap_svg(_grid([[0.5, 0.5], [0.5, 0.5]]))
    assert "<svg" in svg


def test_heatmap_svg_rejects_empty():
    with pytest.raises(ValidationError):
        heatmap_svg(_grid(np.zeros((0, 0))))
