import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import STANDARD_LAWS, dense_lag, mc_moments, null_cov_dense, residual_maker_inv
from serialcorr.errors import DimensionError, LagOutOfRange, SingularDesign
from serialcorr.linalg import (
    compute_residual_maker,
    general_moments,
    lag_sandwich,
    lag_trace,
    null_cov_kernel,
)
from serialcorr.montecarlo import generate_design


def test_intercept_only():
    rm = compute_residual_maker(np.ones((4, 1)))
    np.testing.assert_allclose(rm.r, np.eye(4) - np.full((4, 4), 0.25), atol=1e-15)


def test_coordinate_projection():
    x = np.array([[1.0], [0.0], [0.0]])
    rm = compute_residual_maker(x)
    np.testing.assert_allclose(rm.r, np.diag([0.0, 1.0, 1.0]), atol=1e-15)


def test_generated_design_identities(design):
    x = design(32, 2, 1)
    rm = compute_residual_maker(x)
    assert abs(np.trace(rm.r) - 30) <= 1e-8
    assert np.abs(rm.r @ x).max() <= 1e-8 * np.abs(x).max()


@pytest.mark.parametrize("n,p", [(8, 1), (32, 8), (64, 63), (200, 60)])
def test_residual_maker_invariants(n, p):
    x = generate_design(n, p, p // 2, np.random.default_rng(n + p))
    rm = compute_residual_maker(x)
    r = rm.r
    assert np.array_equal(r, r.T)
    assert np.abs(r @ r - r).max() <= 1e-8
    assert abs(np.trace(r) - (n - p)) <= 1e-8
    assert np.abs(r @ x).max() <= 1e-8 * np.abs(x).max()
    np.testing.assert_allclose(r, residual_maker_inv(x), atol=1e-9)


def test_singular_design():
    x = np.ones((10, 2))
    with pytest.raises(SingularDesign):
        compute_residual_maker(x)
    x = np.column_stack([np.arange(10.0), 2 * np.arange(10.0) + 1e-13])
    with pytest.raises(SingularDesign):
        compute_residual_maker(x)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        compute_residual_maker(np.ones((3, 3)))
    with pytest.raises(DimensionError):
        compute_residual_maker(np.ones((1, 1)))
    with pytest.raises(DimensionError):
        compute_residual_maker(np.full((4, 1), np.nan))
    rm = compute_residual_maker(np.ones((4, 1)))
    with pytest.raises(DimensionError):
        rm.residuals(np.ones(5))


def test_lag_trace_examples(design):
    rm = compute_residual_maker(np.ones((4, 1)))
    assert lag_trace(rm, 0) == pytest.approx(3.0, abs=1e-12)
    assert lag_trace(rm, 1) == pytest.approx(-0.75, abs=1e-12)
    with pytest.raises(LagOutOfRange):
        lag_trace(rm, 4)

    rm = compute_residual_maker(design(16, 4))
    for tau in range(16):
        assert abs(lag_trace(rm, tau) - np.trace(dense_lag(16, tau) @ rm.r)) <= 1e-10


def test_lag_sandwich_three_by_three():
    rm = compute_residual_maker(np.ones((3, 1)))
    # (I - J/3) S_1 (I - J/3) expanded by hand
    expected = np.array([[-1, -1, 2], [5, -4, -1], [-4, 5, -1]]) / 9.0
    np.testing.assert_allclose(lag_sandwich(rm, 1).b, expected, atol=1e-15)
    assert np.array_equal(lag_sandwich(rm, 0).b, rm.r)


def test_lag_sandwich_dense(design):
    rm = compute_residual_maker(design(20, 5))
    for tau in range(0, 20, 3):
        dense = rm.r @ dense_lag(20, tau) @ rm.r
        assert np.abs(lag_sandwich(rm, tau).b - dense).max() <= 1e-10


def test_null_cov_kernel_examples(design):
    x = design(30, 6)
    rm = compute_residual_maker(x)
    assert null_cov_kernel(rm, 0, 0, 0.0) == pytest.approx(2 * 24, abs=1e-9)
    for nu4 in (-1.2, 0.7, 3.0):
        expected = nu4 * np.sum(np.diag(rm.r) ** 2) + 2 * 24
        assert null_cov_kernel(rm, 0, 0, nu4) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("nu4", [0.0, -1.2, 1.5])
def test_null_cov_kernel_dense_and_symmetric(design, nu4):
    rm = compute_residual_maker(design(24, 5))
    for t1 in range(6):
        for t2 in range(6):
            k12 = null_cov_kernel(rm, t1, t2, nu4)
            assert abs(k12 - null_cov_dense(rm.r, t1, t2, nu4)) <= 1e-9
            assert abs(k12 - null_cov_kernel(rm, t2, t1, nu4)) <= 1e-9


def test_null_cov_kernel_monte_carlo(design):
    rng = np.random.default_rng(2024)
    x = design(64, 16)
    rm = compute_residual_maker(x)
    z = rng.normal(size=(64, 200_000))
    e = rm.r @ z
    g1 = np.einsum("ij,ij->j", e[1:], e[:-1])
    g2 = np.einsum("ij,ij->j", e[2:], e[:-2])
    _, _, cov, se = mc_moments(np.column_stack([g1, g2]))
    assert abs(cov[0, 1] - null_cov_kernel(rm, 1, 2, 0.0)) <= 3 * se[0, 1]


def test_general_moments_null_examples(design):
    rm = compute_residual_maker(design(20, 4))
    mean, cov = general_moments(rm, np.eye(20), 0, 0, 0.0)
    assert mean == pytest.approx(16, abs=1e-9)
    assert cov == pytest.approx(32, abs=1e-9)
    mean, _ = general_moments(rm, 2.0 * np.eye(20), 0, 0, 0.0)
    assert mean == pytest.approx(64, abs=1e-9)
    with pytest.raises(DimensionError):
        general_moments(rm, np.eye(19), 0, 0, 0.0)


@pytest.mark.parametrize("sigma2", [0.25, 1.0, 9.0])
def test_general_moments_reduce_to_null(design, sigma2):
    rm = compute_residual_maker(design(25, 5))
    for t1 in range(4):
        for t2 in range(4):
            mean, cov = general_moments(rm, np.sqrt(sigma2) * np.eye(25), t1, t2, 0.8)
            assert mean == pytest.approx(sigma2 * lag_trace(rm, t1), rel=1e-9, abs=1e-12)
            assert cov == pytest.approx(sigma2**2 * null_cov_kernel(rm, t1, t2, 0.8), rel=1e-9)


def _ar1_sigma_sqrt(n, rho):
    idx = np.arange(n)
    sigma = rho ** np.abs(idx[:, None] - idx[None, :]) / (1 - rho**2)
    w, v = np.linalg.eigh(sigma)
    return (v * np.sqrt(w)) @ v.T


@pytest.mark.parametrize("law", ["normal", "gamma"])
def test_general_moments_ar1_monte_carlo(law):
    rng = np.random.default_rng(99)
    x = generate_design(12, 2, 1, rng)
    rm = compute_residual_maker(x)
    s_half = _ar1_sigma_sqrt(12, 0.5)
    draw, nu4 = STANDARD_LAWS[law]
    e = rm.r @ s_half @ draw(rng, (12, 200_000))
    g = np.column_stack([np.einsum("ij,ij->j", e[t:], e[: 12 - t]) for t in (0, 1, 2)])
    mean, se_mean, cov, se_cov = mc_moments(g)
    for a, t1 in enumerate((0, 1, 2)):
        for b, t2 in enumerate((0, 1, 2)):
            m, c = general_moments(rm, s_half, t1, t2, nu4)
            assert abs(cov[a, b] - c) <= 3 * se_cov[a, b]
        assert abs(mean[a] - general_moments(rm, s_half, t1, t1, nu4)[0]) <= 3 * se_mean[a]


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(6, 40),
    pfrac=st.floats(0.05, 0.7),
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(-100, 100),
)
def test_residuals_ignore_column_space(n, pfrac, seed, scale):
    p = max(1, int(pfrac * n))
    rng = np.random.default_rng(seed)
    x = generate_design(n, p, p // 2, rng)
    rm = compute_residual_maker(x)
    y = rng.normal(size=n)
    b = scale * rng.normal(size=p)
    np.testing.assert_allclose(rm.residuals(y + x @ b), rm.residuals(y), atol=1e-8 * (1 + abs(scale)))
