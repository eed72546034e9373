import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from difflab import (
    GridFunction,
    PointSet,
    SeedSpec,
    SpectralMeasure,
    WeightedPointSet,
    Window,
    WindowTooLarge,
    point_density,
    read_grid_function,
    read_point_set,
    restrict,
    sample_poisson,
    window_volume,
    write_grid_function,
    write_point_set,
)


def test_window_volume_definitions():
    assert window_volume(Window.interval(10.0)) == 10.0
    assert window_volume(Window.disk(1.0)) == pytest.approx(np.pi)
    assert window_volume(Window.square(2.0)) == 4.0


def test_window_validation():
    with pytest.raises(ValueError):
        Window("interval", 0.0)
    with pytest.raises(ValueError):
        Window("hexagon", 1.0)


def test_point_density_trivial():
    p = PointSet(np.linspace(-4.5, 4.5, 10), Window.interval(10.0))
    assert point_density(p) == pytest.approx(1.0)
    assert point_density(PointSet([], Window.interval(5.0))) == 0.0


def test_point_density_poisson_counts():
    # Poisson(rho=2) on L=1e4: density within 3 sigma = 3*sqrt(2/1e4)
    p = sample_poisson(2.0, Window.interval(1.0e4), SeedSpec(100))
    assert abs(point_density(p) - 2.0) < 3.0 * np.sqrt(2.0 / 1.0e4)


def test_restrict_1d():
    p = PointSet([-3.0, 0.0, 3.0], Window.interval(10.0))
    q = restrict(p, Window.interval(4.0))
    assert q.points.tolist() == [0.0]
    assert q.window.size == 4.0
    same = restrict(p, Window.interval(10.0))
    assert same.points.tolist() == p.points.tolist()


def test_restrict_2d_disk():
    pts = np.array([[0.2, 0.1], [1.5, 0.0], [0.0, 1.9]])
    p = PointSet(pts, Window.disk(2.0))
    q = restrict(p, Window.disk(1.0))
    assert len(q) == 1 and np.allclose(q.points[0], [0.2, 0.1])


def test_restrict_window_too_large():
    p = PointSet([0.0], Window.interval(4.0))
    with pytest.raises(WindowTooLarge):
        restrict(p, Window.interval(5.0))
    with pytest.raises(WindowTooLarge):
        restrict(p, Window.disk(1.0))


@settings(deadline=None, max_examples=60)
@given(
    st.lists(st.floats(-5.0, 5.0), max_size=30),
    st.floats(0.5, 9.5),
)
def test_restrict_idempotent(xs, sub):
    p = PointSet([x for x in xs if abs(x) < 5.0], Window.interval(10.0))
    w = Window.interval(sub)
    once = restrict(p, w)
    twice = restrict(once, w)
    assert np.array_equal(once.points, twice.points)
    # density is computed against the new window volume
    if len(once):
        assert point_density(once) == len(once) / sub


def test_strict_containment():
    with pytest.raises(ValueError):
        PointSet([5.0], Window.interval(10.0))  # boundary point is outside


def test_weighted_length_mismatch():
    p = PointSet([0.0, 1.0], Window.interval(10.0))
    with pytest.raises(ValueError):
        WeightedPointSet(p, [1.0])


def test_pm1_weight_values_allowed():
    p = PointSet([0.0, 1.0], Window.interval(10.0))
    w = WeightedPointSet(p, [1.0, -1.0])
    assert set(np.unique(w.weights)) == {-1.0, 1.0}


def test_grid_function_invariants():
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0, 1.5], [1.0, 2.0, 3.0])  # non uniform
    with pytest.raises(ValueError):
        GridFunction([1.0, 0.5], [1.0, 2.0])  # decreasing
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0], [np.inf, 0.0])
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0], [0.0, 1.0], stderr=[-1.0, 0.0])


def test_spectral_measure_positivity():
    with pytest.raises(ValueError):
        SpectralMeasure(atoms=((0.0, -1.0),))
    m = SpectralMeasure(atoms=((0.0, 2.0),), ac_density=lambda x: np.full_like(x, 0.5))
    assert m.ac(np.array([1.0, 2.0])).tolist() == [0.5, 0.5]


def test_seed_spec_determinism_and_purpose_streams():
    a = SeedSpec(42, 3).rng().standard_normal(8)
    b = SeedSpec(42, 3).rng().standard_normal(8)
    c = SeedSpec(42, 4).rng().standard_normal(8)
    d = SeedSpec(42, 3).rng(purpose=1).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_point_set_csv_roundtrip_1d():
    p = PointSet([-1.25, 0.5, 3.0], Window.interval(10.0))
    buf = io.StringIO()
    write_point_set(p, buf)
    q = read_point_set(io.StringIO(buf.getvalue()))
    assert np.array_equal(p.points, q.points)
    assert q.window == p.window
    assert buf.getvalue().splitlines()[0] == "# window: interval 10"
    assert buf.getvalue().splitlines()[1] == "x"


def test_point_set_csv_roundtrip_weighted_2d():
    pts = np.array([[0.1, -0.2], [1.0, 1.0]])
    w = WeightedPointSet(PointSet(pts, Window.square(4.0)), [1.0, -1.0])
    buf = io.StringIO()
    write_point_set(w, buf)
    lines = buf.getvalue().splitlines()
    assert lines[1] == "x,y,w"
    q = read_point_set(io.StringIO(buf.getvalue()))
    assert isinstance(q, WeightedPointSet)
    assert np.array_equal(q.points, pts)
    assert np.array_equal(q.weights, w.weights)


def test_grid_function_csv_roundtrip():
    g = GridFunction([0.0, 0.5, 1.0], [1.0, 2.0, 3.0], stderr=[0.1, 0.2, 0.3], n_replicas=7)
    buf = io.StringIO()
    write_grid_function(g, buf)
    q = read_grid_function(io.StringIO(buf.getvalue()))
    assert np.array_equal(q.grid, g.grid)
    assert np.array_equal(q.values, g.values)
    assert np.array_equal(q.stderr, g.stderr)
    assert q.n_replicas == 7
    bare = GridFunction([0.0, 1.0], [5.0, 6.0])
    buf2 = io.StringIO()
    write_grid_function(bare, buf2)
    assert "stderr" not in buf2.getvalue().splitlines()[1]
    assert read_grid_function(io.StringIO(buf2.getvalue())).stderr is None
