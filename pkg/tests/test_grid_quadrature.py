import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpbg.numerics.grid import Grid, GridFunction, band_limited, lp_norm, propagate
from gpbg.numerics.quadrature import SimplexQuadrature


@pytest.mark.parametrize("N", [4, 12, 0])
def test_grid_needs_power_of_two(N):
    with pytest.raises(ValueError):
        Grid(N)


def test_grid_geometry():
    g = Grid(16, 4.0)
    assert g.dx == 0.25
    assert np.allclose(g.xi[:3], [0, 2 * np.pi / 4, 4 * np.pi / 4])
    assert g.centered_x.min() == -2.0


def test_zero_step_is_identity():
    g = Grid(32)
    f = band_limited(g, np.random.default_rng(1))
    assert np.array_equal(propagate(f, 0.0).values, f.values)


def test_single_mode_phase():
    g = Grid(32, 2 * np.pi)
    f = GridFunction(g, np.exp(1j * g.x))
    u = propagate(f, 0.3)
    assert np.allclose(u.values, np.exp(-0.3j) * f.values, atol=1e-14)
    assert abs(u.norm() / f.norm() - 1) <= 1e-13


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**32 - 1))
def test_unitary_group(a, b, seed):
    g = Grid(64, 10.0)
    f = band_limited(g, np.random.default_rng(seed), modes=8)
    fa = propagate(f, a)
    assert abs(fa.norm() - f.norm()) <= 1e-13 * f.norm()
    both = propagate(fa, b).values
    assert np.abs(both - propagate(f, a + b).values).max() <= 1e-12 * np.abs(f.values).max()


def test_lp_norms():
    g = Grid(8, 8.0)
    v = np.ones(8)
    assert lp_norm(v, g, 1) == pytest.approx(8.0)
    assert lp_norm(v, g, 2) == pytest.approx(math.sqrt(8.0))
    assert lp_norm(v, g, np.inf) == 1.0


def test_binary_round_trip(tmp_path):
    g = Grid(16)
    f = band_limited(g, np.random.default_rng(5))
    data = f.to_bytes()
    assert data[:4] == b"GPGF" and len(data) == 16 + 16 * 16
    assert int.from_bytes(data[8:16], "little") == 16
    assert GridFunction.from_bytes(data) == f
    path = tmp_path / "phi.gpgf"
    f.save(path)
    assert GridFunction.load(path) == f
    with pytest.raises(ValueError):
        GridFunction.from_bytes(b"XXXX" + data[4:])


def test_grid_function_is_read_only():
    f = band_limited(Grid(8), np.random.default_rng(0))
    with pytest.raises(ValueError):
        f.values[0] = 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_simplex_volume_and_ordering(n):
    q = SimplexQuadrature(5)
    pts, w = q.nodes(n, 0.7)
    assert w.sum() == pytest.approx(0.7**n / math.factorial(n), rel=1e-13)
    assert np.all(np.diff(pts, axis=1) <= 0) and np.all(pts <= 0.7) and np.all(pts >= 0)


def test_simplex_polynomial_exactness():
    # int over t >= t1 >= t2 >= 0 of t1 * t2 = t^4 / 8
    q = SimplexQuadrature(4)
    val = q.integrate(lambda p: p[:, 0] * p[:, 1], 2, 1.3)
    assert val == pytest.approx(1.3**4 / 8, rel=1e-13)


def test_permuted_simplex():
    q = SimplexQuadrature(4)
    s, w = q.nodes_for_order(3, 1.0, (2, 3, 1))
    assert np.all(s[:, 1] >= s[:, 2]) and np.all(s[:, 2] >= s[:, 0])
    # int of t1 over {t2 >= t3 >= t1}: t1 is the smallest, mean t/4
    assert np.dot(w, s[:, 0]) == pytest.approx(1 / 24, rel=1e-13)


def test_order_validation():
    with pytest.raises(ValueError):
        SimplexQuadrature(1)
