import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewnerkit import (
    DriverPath,
    DriverSet,
    herglotz_to_drivers,
    make_polynomial_driver,
    stieltjes_integral,
    validate_convergence,
)
from loewnerkit.drivers import refine_times

from conftest import single_driver


def test_polynomial_driver_samples():
    assert np.allclose(make_polynomial_driver([0, 1], 4, 1.0).values, [0, .25, .5, .75, 1])
    assert not make_polynomial_driver([0], 7, 2.0).values.any()
    assert np.allclose(make_polynomial_driver([0, 0, 1], 2, 1.0).values, [0, .25, 1])


def test_polynomial_driver_errors():
    with pytest.raises(ValueError):
        make_polynomial_driver([0, 1], 0, 1.0)
    with pytest.raises(ValueError):
        make_polynomial_driver([0, np.nan], 3, 1.0)
    with pytest.raises(ValueError):
        make_polynomial_driver([0, 1j], 3, 1.0, real=True)


def test_path_validation():
    with pytest.raises(ValueError):
        DriverPath([0, 0.5, 0.5], [0, 1, 2])
    with pytest.raises(ValueError):
        DriverPath([0.1, 0.5], [0, 1])
    with pytest.raises(ValueError):
        DriverPath([0, 1], [0, 1j], real=True)


def test_driver_set_validation():
    x0 = make_polynomial_driver([1.0], 4, 1.0)
    with pytest.raises(ValueError, match="x0"):
        DriverSet(x0, ())
    a = make_polynomial_driver([0.0, 1.0], 4, 1.0)
    b = make_polynomial_driver([0.0, 1.0], 5, 1.0)
    with pytest.raises(ValueError):
        DriverSet(a, (b,))
    ds = DriverSet(a, (a,))
    assert ds.driver(7).is_zero()


def test_stieltjes_examples():
    lin = make_polynomial_driver([0, 1], 10, 1.0)
    sq = make_polynomial_driver([0, 0, 1], 10, 1.0)
    assert stieltjes_integral(lambda u: np.ones_like(u), lin, 0, 1) == pytest.approx(1)
    assert stieltjes_integral(lambda u: u, lin, 0, 1) == pytest.approx(0.5)
    assert stieltjes_integral(lambda u: np.ones_like(u), sq, 0, 1) == pytest.approx(1)


def test_stieltjes_interval_errors():
    lin = make_polynomial_driver([0, 1], 10, 1.0)
    with pytest.raises(ValueError):
        stieltjes_integral(lambda u: u, lin, 0.6, 0.2)
    with pytest.raises(ValueError):
        stieltjes_integral(lambda u: u, lin, 0, 1.5)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_stieltjes_additive(a, b, c):
    s, m, t = sorted((a, b, c))
    x = make_polynomial_driver([0, 0.3, -1j, 0.5], 7, 1.0)
    phi = lambda u: np.cos(3 * u) + 1j * u**2
    whole = stieltjes_integral(phi, x, s, t)
    assert whole == pytest.approx(stieltjes_integral(phi, x, s, m) + stieltjes_integral(phi, x, m, t),
                                  abs=1e-3)


def test_stieltjes_additive_exact_at_nodes():
    x = make_polynomial_driver([0, 0.3, -1j, 0.5], 10, 1.0)
    phi = np.sin(np.arange(11.0))  # node samples, interpolated linearly
    whole = stieltjes_integral(phi, x, 0.0, 1.0)
    parts = stieltjes_integral(phi, x, 0.0, 0.4) + stieltjes_integral(phi, x, 0.4, 1.0)
    assert abs(whole - parts) < 1e-14


def test_stieltjes_linear():
    x = make_polynomial_driver([0, 1, 0.2j], 6, 1.0)
    y = make_polynomial_driver([0, -0.5, 1], 6, 1.0)
    xy = DriverPath(x.times, 2 * x.values + 3 * y.values)
    f, g = np.cos, np.exp
    lhs = stieltjes_integral(lambda u: f(u) + 2 * g(u), xy, 0.1, 0.9)
    rhs = sum(a * b * stieltjes_integral(h, p, 0.1, 0.9)
              for a, p in ((2, x), (3, y)) for b, h in ((1, f), (2, g)))
    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_trapezoid_order_two():
    x = make_polynomial_driver([0, 0, 1], 4, 1.0)
    phi = lambda u: np.sin(5 * u)
    ref = stieltjes_integral(phi, x, 0, 1, refine=4096)
    errs = [abs(stieltjes_integral(phi, x, 0, 1, refine=r) - ref) for r in (4, 8, 16)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 1.8) & (orders < 2.2))


def test_herglotz_bridge():
    times = np.linspace(0, 1, 11)
    one = DriverPath(times, np.ones(11), real=True)
    zero = DriverPath(times, np.zeros(11), real=True)
    ds = herglotz_to_drivers(one, [zero], [zero])
    assert np.allclose(ds.x0.values, times) and ds.xs[0].is_zero()
    ds = herglotz_to_drivers(one, [one], [zero])
    assert np.allclose(ds.xs[0].values, times)
    ds = herglotz_to_drivers(one, [zero], [one])
    assert np.allclose(ds.xs[0].values, -1j * times)
    other = DriverPath(np.linspace(0, 1, 5), np.ones(5), real=True)
    with pytest.raises(ValueError):
        herglotz_to_drivers(one, [other], [zero])


def test_validate_convergence():
    assert validate_convergence(DriverSet.zero(5, 1.0, 3), 0.5) == 0
    assert validate_convergence(single_driver(1), 0.5) == pytest.approx(0.5)
    assert validate_convergence(single_driver(2), 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        validate_convergence(single_driver(1), 1.0)


@given(st.integers(1, 6), st.floats(0.05, 0.95))
def test_bridge_then_convergence_finite(K, r):
    rng = np.random.default_rng(K)
    times = np.linspace(0, 1, 9)
    mk = lambda: DriverPath(times, rng.normal(size=9), real=True)
    ds = herglotz_to_drivers(mk(), [mk() for _ in range(K)], [mk() for _ in range(K)])
    assert np.isfinite(validate_convergence(ds, r))


def test_refined_grid_keeps_nodes():
    t = refine_times([0, 0.3, 1.0], 4)
    assert t.size == 9 and 0.3 in t
    ds = single_driver(1, G=5)
    grid = ds.fine_grid(3, 0.25, 0.9)
    assert grid.t[0] == 0.25 and grid.t[-1] == 0.9
    assert np.all(np.isin(ds.times[(ds.times > 0.25) & (ds.times < 0.9)], grid.t))
