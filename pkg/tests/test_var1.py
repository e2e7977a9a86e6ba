from types import SimpleNamespace

import numpy as np
import pytest

from msvekit.errors import PreconditionError
from msvekit.numerics import RngStream, cholesky
from msvekit.var1 import (
    SETTINGS,
    Var1Spec,
    ar1_cov,
    setting,
    simulate,
    spec_from_dict,
    stationary_cov,
    true_sigma,
    truth,
)


def test_ar1_cov_examples():
    np.testing.assert_array_equal(ar1_cov(4, 0.0), np.eye(4))
    np.testing.assert_array_equal(ar1_cov(3, 0.5), [[1, .5, .25], [.5, 1, .5], [.25, .5, 1]])
    for rho in (-0.95, -0.5, 0.3, 0.9, 0.99):
        cholesky(ar1_cov(8, rho))
    with pytest.raises(PreconditionError):
        ar1_cov(3, 1.0)


def test_spec_invariants():
    with pytest.raises(PreconditionError):
        Var1Spec(phi=np.diag([0.5, 1.0]), w=np.eye(2))
    with pytest.raises(PreconditionError):
        Var1Spec(phi=[[0.0, 2.0], [-2.0, 0.0]], w=np.eye(2))
    with pytest.raises(PreconditionError):
        Var1Spec(phi=np.zeros((2, 2)), w=[[1.0, 2.0], [2.0, 1.0]])


def test_stationary_zero_phi():
    w = ar1_cov(3, 0.4)
    spec = Var1Spec(phi=np.zeros((3, 3)), w=w)
    np.testing.assert_allclose(stationary_cov(spec), w, atol=1e-15)
    np.testing.assert_allclose(true_sigma(spec), w, atol=1e-15)


def test_scalar_closed_forms():
    phi, w = 0.6, 2.0
    spec = Var1Spec(phi=[[phi]], w=[[w]])
    assert stationary_cov(spec)[0, 0] == pytest.approx(w / (1 - phi ** 2), rel=1e-14)
    assert stationary_cov(spec, "kron")[0, 0] == pytest.approx(w / (1 - phi ** 2), rel=1e-14)
    assert true_sigma(spec)[0, 0] == pytest.approx(w / (1 - phi) ** 2, rel=1e-13)


@pytest.mark.parametrize("sid", SETTINGS)
def test_diagonal_closed_form_matches_kron(sid):
    spec = setting(sid)
    v_closed = stationary_cov(spec, "diagonal")
    v_kron = stationary_cov(spec, "kron")
    assert np.linalg.norm(v_closed - v_kron) <= 1e-10 * np.linalg.norm(v_kron)
    resid = v_closed - spec.phi @ v_closed @ spec.phi.T - spec.w
    assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(v_closed)


def test_non_diagonal_spec(rng):
    a = rng.standard_normal((4, 4))
    phi = 0.5 * a / np.abs(np.linalg.eigvals(a)).max()
    spec = Var1Spec(phi=phi, w=ar1_cov(4, 0.3))
    v = stationary_cov(spec)
    assert np.linalg.norm(v - phi @ v @ phi.T - spec.w) <= 1e-10 * np.linalg.norm(v)
    t = truth(spec)
    series = t.V.copy()
    for s in range(1, 200):
        g = t.lag_autocov(s)
        series += g + g.T
    assert np.linalg.norm(series - t.Sigma) <= 1e-10 * np.linalg.norm(t.Sigma)
    with pytest.raises(PreconditionError):
        stationary_cov(spec, "diagonal")


def test_settings_registry():
    s1 = setting(1)
    lam = np.diag(s1.phi)
    assert s1.p == 10 and lam[0] == pytest.approx(0.01) and lam[-1] == pytest.approx(0.20)
    s6 = setting(6)
    assert s6.p == 50 and s6.phi_max == pytest.approx(0.9)
    assert [setting(k).p for k in SETTINGS] == [10, 10, 10, 50, 50, 50]
    np.testing.assert_array_equal(s1.w, ar1_cov(10, 0.5))
    for bad in (0, 7, "x"):
        with pytest.raises(PreconditionError):
            setting(bad)


def test_lag_autocov_negative_is_transpose():
    t = truth(setting(2))
    np.testing.assert_array_equal(t.lag_autocov(-3), t.lag_autocov(3).T)
    np.testing.assert_array_equal(t.lag_autocov(0), t.V)


def test_simulate_zero_noise():
    spec = SimpleNamespace(p=2, phi=np.zeros((2, 2)), w_chol=np.zeros((2, 2)), is_diagonal=True)
    y = simulate(spec, 50, RngStream(1))
    np.testing.assert_array_equal(y.values, np.zeros((50, 2)))


def test_simulate_white_noise():
    y = simulate(Var1Spec(phi=np.zeros((2, 2)), w=np.eye(2)), 100_000, RngStream(8))
    assert np.abs(np.cov(y.values.T) - np.eye(2)).max() < 0.05


def test_simulate_deterministic_and_prefix():
    spec = setting(3)
    a = simulate(spec, 2000, RngStream(42, 3))
    b = simulate(spec, 2000, RngStream(42, 3))
    np.testing.assert_array_equal(a.values, b.values)
    c = simulate(spec, 500, RngStream(42, 3))
    np.testing.assert_array_equal(a.values[:500], c.values)


def test_simulate_first_row_is_innovation():
    spec = setting(2)
    y = simulate(spec, 1, RngStream(5))
    eps = spec.w_chol @ RngStream(5).standard_normal((1, spec.p))[0]
    np.testing.assert_allclose(y.values[0], eps, rtol=1e-14, atol=1e-15)


def _reference_path(phi, chol, rng, n):
    eps = rng.standard_normal((n, phi.shape[0])) @ chol.T
    out = np.zeros_like(eps)
    prev = np.zeros(phi.shape[0])
    for t in range(n):
        prev = phi @ prev + eps[t]
        out[t] = prev
    return out


def test_diagonal_filter_path_matches_recursion():
    spec = Var1Spec(phi=np.diag([0.3, -0.5, 0.8]), w=ar1_cov(3, 0.5))
    got = simulate(spec, 300, RngStream(10)).values
    ref = _reference_path(spec.phi, spec.w_chol, RngStream(10), 300)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_general_path_matches_recursion():
    spec = Var1Spec(phi=[[0.3, 0.2], [-0.1, 0.6]], w=ar1_cov(2, 0.5))
    got = simulate(spec, 300, RngStream(11)).values
    ref = _reference_path(spec.phi, spec.w_chol, RngStream(11), 300)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_empirical_lag_autocov_setting1():
    spec = setting(1)
    t = truth(spec)
    n = 100_000
    y = simulate(spec, n, RngStream(77)).values
    z = y - y.mean(axis=0)
    for s in (0, 1, 2):
        emp = z[: n - s].T @ z[s:] / n
        # crude standard error for a lag product of a short-memory process
        se = np.sqrt(np.outer(np.diag(t.V), np.diag(t.V)) * 2.0 / n) * 1.5
        assert np.all(np.abs(emp - t.lag_autocov(s)) <= 5 * se)


def test_spec_from_dict():
    s = spec_from_dict({"phi": [0.1, 0.2], "w": {"ar1": {"rho": 0.5}}})
    np.testing.assert_array_equal(s.w, ar1_cov(2, 0.5))
    assert spec_from_dict({"setting": 4}).p == 50
    s = spec_from_dict({"phi": [[0.1, 0.05], [0.0, 0.2]], "w": [[1.0, 0.0], [0.0, 2.0]]})
    assert not s.is_diagonal
    with pytest.raises(PreconditionError):
        spec_from_dict({"w": [[1.0]]})


@pytest.mark.parametrize("sid", SETTINGS)
def test_truncated_series_plus_exact_tail(sid):
    # sum_{s>S} Phi^s V = Phi^(S+1) (I - Phi)^{-1} V, so the truncated series
    # plus this tail (and its transpose) must reproduce Sigma to rounding
    t = truth(setting(sid))
    phi = t.spec.phi
    S = 64
    series = t.V.copy()
    for s in range(1, S + 1):
        g = t.lag_autocov(s)
        series += g + g.T
    tail = np.linalg.matrix_power(phi, S + 1) @ np.linalg.solve(np.eye(t.spec.p) - phi, t.V)
    total = series + tail + tail.T
    assert np.linalg.norm(total - t.Sigma) <= 1e-12 * np.linalg.norm(t.Sigma)
