import numpy as np
import pytest

from loewnerkit import (
    DriverSet,
    faber_from_f,
    faber_ode,
    grunsky_explicit,
    grunsky_from_f,
    grunsky_ode,
    inverse_ode_residual,
    random_polynomial_drivers,
    solve_taylor_ode,
    taylor_explicit,
)

from conftest import single_driver


def test_taylor_zero_drivers():
    tr = solve_taylor_ode(DriverSet.zero(10, 1.0, 3), 5)
    assert np.all(tr.C == 1) and np.all(tr.c == 0)


def test_taylor_x1_closed_form():
    ds = single_driver(1, G=250, T=0.5)
    tr = solve_taylor_ode(ds, 8)
    assert np.allclose(tr.c[-1], 0.5 ** np.arange(1, 9), atol=1e-8, rtol=0)
    assert np.allclose(taylor_explicit(ds, 0.5, 8, refine=64), 0.5 ** np.arange(1, 9), atol=1e-8, rtol=0)


def test_taylor_x2_closed_form():
    # z (1 - 2 t z^2)^{-1/2} = z + t z^3 + 3/2 t^2 z^5 + ...
    t = 0.5
    ds = single_driver(2, G=250, T=t)
    for c in (solve_taylor_ode(ds, 4).c[-1], taylor_explicit(ds, t, 4)):
        assert abs(c[1] - t) < 1e-8 and abs(c[2]) < 1e-8 and abs(c[3] - 1.5 * t**2) < 1e-8
        assert abs(c[0]) < 1e-12


def test_C_is_exp_x0(random_ds):
    tr = solve_taylor_ode(random_ds, 3)
    assert np.max(np.abs(tr.C.imag)) < 1e-10
    assert np.allclose(tr.C, np.exp(random_ds.x0(tr.times).real), atol=1e-8, rtol=0)


def test_taylor_frozen_oracle(oracle_values):
    ds, c, _ = oracle_values
    assert np.allclose(solve_taylor_ode(ds, 6).c[-1], c, atol=1e-10, rtol=0)
    assert np.allclose(taylor_explicit(ds, 1.0, 6, refine=64), c, atol=1e-7, rtol=0)


def test_taylor_two_routes_intermediate_time(random_ds):
    tr = solve_taylor_ode(random_ds, 5, refine=32)
    t = random_ds.times[17]
    ex = taylor_explicit(random_ds, t, 5, refine=32)
    assert np.allclose(tr.c[tr.index(t)], ex, atol=1e-6)


def test_grunsky_ode_examples():
    gr = grunsky_ode(DriverSet.zero(10, 1.0, 8), 3)
    assert np.all(gr.b == 0)
    t = 0.5
    b = grunsky_ode(single_driver(2, G=50, T=t), 3).final()
    assert b[1, 1] == pytest.approx(-t, abs=1e-12)
    assert b[1, 2] == pytest.approx(0, abs=1e-12)
    assert b[1, 3] == pytest.approx(-t**2 / 2, abs=1e-10)
    b = grunsky_ode(single_driver(1, G=50, T=t), 3).final()
    assert np.allclose(b.b, 0, atol=1e-12)


def test_grunsky_ode_starts_at_zero(random_ds):
    assert np.all(grunsky_ode(random_ds, 3).b[0] == 0)


def test_grunsky_explicit_examples():
    assert np.all(grunsky_explicit(DriverSet.zero(10, 1.0, 8), 1.0, 3).b == 0)
    t = 0.5
    b = grunsky_explicit(single_driver(2, G=50, T=t), t, 3)
    assert b[1, 1] == pytest.approx(-t, abs=1e-12)
    assert b[1, 3] == pytest.approx(-t**2 / 2, abs=1e-6)
    with pytest.raises(ValueError):
        grunsky_explicit(single_driver(2), 1.0, 3, W=5)


def test_grunsky_frozen_oracle(oracle_values):
    ds, _, b = oracle_values
    assert np.allclose(grunsky_ode(ds, 3).final().b, b, atol=1e-10, rtol=0)
    assert np.allclose(grunsky_explicit(ds, 1.0, 3, refine=64).b, b, atol=1e-7, rtol=0)


def test_grunsky_symmetry_each_route(random_ds):
    assert grunsky_ode(random_ds, 4).final().symmetry_defect() < 1e-8
    assert grunsky_explicit(random_ds, 1.0, 4).symmetry_defect() < 1e-8
    f = solve_taylor_ode(random_ds, 8).series(1.0)
    assert grunsky_from_f(f, 4).symmetry_defect() == 0


def test_faber_ode_examples():
    tr = faber_ode(DriverSet.zero(10, 1.0, 3), 3)
    for n in (1, 2, 3):
        assert tr.polynomial(-1, n).to_dict() == {-n: 1}
    t = 0.5
    tr = faber_ode(single_driver(1, G=50, T=t), 2)
    assert np.allclose(tr.polynomial(-1, 1).coeffs, [1, t])
    assert np.allclose(tr.polynomial(-1, 2).coeffs, [1, 2 * t, t**2])
    tr = faber_ode(DriverSet.from_polynomials([0, 1], [], 50, t), 3)
    for n in (1, 2, 3):
        assert tr.polynomial(-1, n)[-n] == pytest.approx(np.exp(n * t), abs=1e-9)
        assert np.allclose(tr.polynomial(-1, n).coeffs[1:], 0)


def test_faber_two_routes(random_ds):
    tr = faber_ode(random_ds, 4)
    ts = solve_taylor_ode(random_ds, 5)
    for j in (0, 100, tr.times.size - 1):
        f = ts.series(tr.times[j])
        for n in range(1, 5):
            assert np.allclose(tr.polynomial(j, n).coeffs, faber_from_f(f, n).coeffs, atol=1e-6)


def test_faber_leading_coefficient(random_ds):
    tr = faber_ode(random_ds, 3)
    x0 = random_ds.x0(tr.times).real
    for n in (1, 2, 3):
        assert np.allclose(tr.q[:, n - 1, n], np.exp(n * x0), atol=1e-8)


def test_inverse_residual_examples():
    ds = DriverSet.zero(10, 1.0, 2)
    assert inverse_ode_residual(ds, solve_taylor_ode(ds, 4)) < 1e-14
    ds = DriverSet.from_polynomials([0, 1], [], 250, 1.0)
    assert inverse_ode_residual(ds, solve_taylor_ode(ds, 4)) < 1e-6
    with pytest.raises(ValueError):
        inverse_ode_residual(ds, solve_taylor_ode(ds, 4, refine=4))


def test_inverse_residual_second_order():
    ds = random_polynomial_drivers(np.random.default_rng(3), 4, 20, 1.0)
    res = [inverse_ode_residual(ds, solve_taylor_ode(ds, 6, r), r) for r in (8, 16, 32)]
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all((orders > 1.8) & (orders < 2.2))
