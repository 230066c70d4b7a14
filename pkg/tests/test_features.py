import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tipinfo.features import DecayFit, fit_decay, integrated_mi, role_scores

T = np.arange(301.0)


def test_single_exponential_offset():
    y = 0.5 * np.exp(-0.1 * T) + 0.2
    fit = fit_decay(y)
    assert fit.omega == pytest.approx(0.2, abs=1e-3)
    assert fit.residual < 1e-8


def test_constant_curve():
    fit = fit_decay(np.full(301, 0.3))
    assert fit.omega == pytest.approx(0.3)
    assert fit.a == 0 and fit.c == 0
    assert integrated_mi(np.full(301, 0.3), fit) == 0.0


def test_recovers_two_rates():
    y = 0.4 * np.exp(-0.5 * T) + 0.1 * np.exp(-0.01 * T)
    fit = fit_decay(y)
    assert fit.form == "double"
    assert fit.b == pytest.approx(0.5, rel=0.05)
    assert fit.d == pytest.approx(0.01, rel=0.05)
    assert fit.omega <= 1e-3


def test_fit_nonnegative_parameters():
    rng = np.random.default_rng(1)
    y = 0.3 * np.exp(-0.2 * T) + 0.05 * np.exp(-0.03 * T) + 0.02 + rng.normal(0, 1e-4, T.size)
    fit = fit_decay(y)
    assert min(fit.a, fit.b, fit.c, fit.d, fit.omega) >= 0
    assert np.all(fit(T) >= 0)


def test_too_short():
    with pytest.raises(ValueError):
        fit_decay(np.ones(9))


def test_integrated_mi_zero_curve():
    y = np.zeros(301)
    assert integrated_mi(y, fit_decay(y)) == 0.0


def test_integrated_mi_geometric_series():
    y = 0.5 * np.exp(-0.1 * T) + 0.2
    mu = integrated_mi(y, fit_decay(y))
    assert mu == pytest.approx(0.5 / (1 - np.exp(-0.1)), rel=0.02)


def test_integrated_mi_tail_closure():
    # a curve cut off early: the fitted tail supplies the missing area
    t = np.arange(40.0)
    y = 0.5 * np.exp(-0.05 * t)
    fit = DecayFit(0.5, 0.05, 0.0, 0.0, 0.0, 0.0, "single")
    assert integrated_mi(y, fit) == pytest.approx(y.sum() + 0.5 * np.exp(-0.05 * 39) / 0.05)


@pytest.mark.parametrize("mu, omega, node, expected", [
    ([[2.0, 1.0], [1.0, 0.5]], [[0.0, 0.0], [0.0, 0.3]], 0, 1.0),
    ([[0.0, 0.0], [1.0, 2.0]], [[0.5, 0.1], [0.0, 0.0]], 0, -1.0),
    ([[3.0, 1.0], [1.0, 0.2]], [[0.1, 0.4], [0.2, 0.0]], 0, 0.0),
])
def test_role_examples(mu, omega, node, expected):
    assert role_scores(mu, omega).role[node] == pytest.approx(expected)


def test_role_all_zero_omega():
    rt = role_scores([[1.0, 2.0]], [[0.0, 0.0]])
    assert rt.role[0] == 1.0 and rt.omega_star[0] == 0.0


def test_role_argmax_nearest_zero():
    rt = role_scores([[1.0, 3.0, 3.0]], [[0.2, 0.2, 0.1]])
    assert rt.mu_argmax[0] == 1 and rt.omega_argmax[0] == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.floats(0.01, 100), st.floats(0.01, 100), st.integers(0, 10_000))
def test_role_bounds_and_scale_invariance(n, m, s1, s2, seed):
    rng = np.random.default_rng(seed)
    mu = rng.random((n, m))
    omega = rng.random((n, m))
    r = role_scores(mu, omega).role
    assert np.all(r >= -1) and np.all(r <= 1)
    np.testing.assert_allclose(role_scores(mu * s1, omega * s2).role, r, atol=1e-12)
