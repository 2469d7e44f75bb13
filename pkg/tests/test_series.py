import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewnerkit import (
    BivariateTruncated,
    TruncatedLaurent,
    TruncatedTaylor,
    bivariate_log,
    compose,
    divided_difference,
    exp_series,
    log_series,
    project_nonpositive,
    residue,
    revert,
    series_arith,
)
from loewnerkit.series import bivariate_exp, inverse_power

T = TruncatedTaylor


def rand_series(seed, N, c0=None, c1=None, scale=0.3):
    rng = np.random.default_rng(seed)
    c = scale * (rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1))
    if c0 is not None:
        c[0] = c0
    if c1 is not None:
        c[1] = c1
    return T(c)


def test_arith_examples():
    assert series_arith(T([1, 1, 0]), T([1, -1, 0]), "mul").allclose(T([1, 0, -1]))
    a = T([1, 2, 3])
    assert series_arith(a, T([0, 0, 0]), "add").allclose(a)
    assert series_arith(T([0, 1, 1]), 2, "scale").allclose(T([0, 2, 2]))


def test_mixed_orders_truncate():
    assert (T([1, 1, 1, 1]) * T([1, 1])).order == 1


def test_log_examples():
    assert log_series(T(np.ones(5))).allclose(T([0, 1, 1 / 2, 1 / 3, 1 / 4]))
    assert log_series(T([1, 0, 0])).allclose(T([0, 0, 0]))
    with pytest.raises(ValueError):
        log_series(T([0, 1, 0]))


@given(st.integers(0, 10**6), st.integers(1, 16))
def test_exp_log_roundtrip(seed, N):
    a = rand_series(seed, N, c0=1.0)
    assert exp_series(log_series(a)).allclose(a, atol=1e-12)


def test_exp_examples():
    assert exp_series(T([0, 0, 0])).allclose(T([1, 0, 0]))
    assert exp_series(T([0, 1, 0, 0])).allclose(T([1, 1, 1 / 2, 1 / 6]))


@given(st.integers(0, 10**6))
def test_exp_functional_equation(seed):
    a, b = rand_series(seed, 8), rand_series(seed + 1, 8)
    assert exp_series(a + b).allclose(exp_series(a) * exp_series(b), atol=1e-12)


def test_revert_examples():
    assert revert(T([0, 1, 0, 0])).allclose(T([0, 1, 0, 0]))
    assert revert(T([0, 1, 1, 0, 0, 0])).allclose(T([0, 1, -1, 2, -5, 14]))
    t = 0.7
    assert revert(T([0, np.exp(t), 0])).allclose(T([0, np.exp(-t), 0]))
    with pytest.raises(ValueError):
        revert(T([1, 1, 0]))
    with pytest.raises(ValueError):
        revert(T([0, 0, 1]))


@given(st.integers(0, 10**6), st.integers(2, 16))
def test_revert_compose_identity(seed, N):
    a = rand_series(seed, N, c0=0.0, c1=1.0)
    ident = T.identity(N)
    r = revert(a)
    # reversion coefficients can grow geometrically; compare at their scale
    tol = 1e-12 * max(1.0, float(np.max(np.abs(r.coeffs))))
    assert compose(r, a).allclose(ident, atol=tol)
    assert compose(a, r).allclose(ident, atol=tol)


def test_compose_examples():
    a = T([1, 2, 3, 4])
    assert compose(a, T.identity(3)).allclose(a)
    assert compose(T([0, 0, 1, 0, 0]), T([0, 1, 1, 0, 0])).allclose(T([0, 0, 1, 2, 1]))
    with pytest.raises(ValueError):
        compose(a, T([1, 1, 0, 0]))


def test_divided_difference_examples():
    assert np.allclose(divided_difference(T([0, 1, 0])).coeffs, [[1]])
    assert np.allclose(divided_difference(T([0, 1, 1, 0, 0])).coeffs, [[1, 1], [1, 0]])
    t = 0.4
    f = T(np.r_[0, t ** np.arange(8)])
    d = divided_difference(f, 3).coeffs
    assert np.allclose(d, t ** np.add.outer(np.arange(4), np.arange(4)))
    with pytest.raises(ValueError):
        divided_difference(T([0, 0, 1]))


@given(st.integers(0, 10**6))
def test_divided_difference_at_zeta_zero(seed):
    f = rand_series(seed, 9, c0=0.0, c1=1.0)
    d = divided_difference(f)
    assert d.at_zeta_zero().allclose(T(f.coeffs[1 : d.order + 2]))


def test_bivariate_log_examples():
    assert np.allclose(bivariate_log(BivariateTruncated(np.eye(3)[:1, :1])).coeffs, 0)
    one_plus = np.zeros((3, 3))
    one_plus[0, 0], one_plus[1, 1] = 1, 1
    expect = np.zeros((3, 3))
    expect[1, 1], expect[2, 2] = 1, -0.5
    assert np.allclose(bivariate_log(BivariateTruncated(one_plus)).coeffs, expect)
    t = 0.3
    d = bivariate_log(divided_difference(T(np.r_[0, t ** np.arange(10)]), 4)).coeffs
    mixed = d[1:, 1:]
    assert np.allclose(mixed, 0, atol=1e-14)
    assert np.allclose(d[1:, 0], t ** np.arange(1, 5) / np.arange(1, 5))
    with pytest.raises(ValueError):
        bivariate_log(BivariateTruncated(np.zeros((2, 2))))


@given(st.integers(0, 10**6))
def test_bivariate_log_symmetric_and_invertible(seed):
    f = rand_series(seed, 11, c0=0.0, c1=1.0)
    d = divided_difference(f)
    lg = bivariate_log(d)
    assert np.allclose(lg.coeffs, lg.coeffs.T, atol=1e-12)
    assert np.allclose(bivariate_exp(lg).coeffs, d.coeffs, atol=1e-12)


def test_residue_examples():
    assert residue(TruncatedLaurent(-1, [1])) == 1
    assert residue(TruncatedLaurent.from_dict({-2: 1, -1: 3, 1: 1})) == 3
    with pytest.raises(ValueError):
        residue(TruncatedLaurent(0, [1, 2]))


def test_project_nonpositive_examples():
    p = project_nonpositive(TruncatedLaurent.from_dict({-2: 1, 0: 1, 1: 1}))
    assert p.to_dict() == {-2: 1, 0: 1}
    assert project_nonpositive(TruncatedLaurent(0, [0, 1, 1])).to_dict() == {}


@given(st.integers(-5, 0), st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=10))
def test_project_nonpositive_idempotent(low, coeffs):
    a = TruncatedLaurent(low, coeffs)
    once = project_nonpositive(a)
    twice = project_nonpositive(once)
    assert np.array_equal(once.coeffs, twice.coeffs) and once.low == twice.low


def test_inverse_power():
    assert inverse_power(T([0, 1, 0, 0]), 2).to_dict() == {-2: 1}
    # (z / (1 - t z))^{-1} = z^{-1} - t
    t = 0.25
    g = T(np.r_[0, t ** np.arange(6)])
    assert np.allclose(inverse_power(g, 1).coeffs[:3], [1, -t, 0])
