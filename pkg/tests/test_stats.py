import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import brute
from trustmap.stats import (
    boundary_pmf,
    cdf_from_pmf,
    check_joint_pmf,
    correlation_band,
    estimate_pmf,
    frechet_bounds,
    hoeffding_covariance,
    joint_pmf_model,
    model_joint,
    quantize,
)


@st.composite
def paired_indices(draw, max_bins=16, max_len=49):
    bins = draw(st.integers(2, max_bins))
    n = draw(st.integers(1, max_len))
    xs = draw(st.lists(st.integers(0, bins - 1), min_size=n, max_size=n))
    ys = draw(st.lists(st.integers(0, bins - 1), min_size=n, max_size=n))
    return np.array(xs), np.array(ys), bins


def test_quantize_examples():
    assert quantize(0.0, 16) == 0
    assert quantize(1.0, 16) == 15
    assert quantize(0.5, 16) == 8


def test_quantize_rejects_bad_input():
    with pytest.raises(ValueError):
        quantize([0.5], 1)
    with pytest.raises(ValueError):
        quantize([1.2], 16)


def test_estimate_pmf_examples():
    np.testing.assert_array_equal(estimate_pmf([0, 0, 1, 1], 2), [0.5, 0.5])
    np.testing.assert_array_equal(estimate_pmf([3, 3, 3], 4), [0, 0, 0, 1])
    patch = np.array([0] * 25 + [1] * 24)
    np.testing.assert_allclose(estimate_pmf(patch, 2), [25 / 49, 24 / 49], rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        estimate_pmf(np.array([], dtype=int), 2)


def test_cdf_examples():
    np.testing.assert_allclose(cdf_from_pmf([0.5, 0.5]), [0.5, 1.0])
    np.testing.assert_allclose(cdf_from_pmf([0, 0, 0, 1]), [0, 0, 0, 1])
    np.testing.assert_allclose(cdf_from_pmf([0.25, 0.25, 0.5]), [0.25, 0.5, 1.0])


def test_frechet_bounds_two_point():
    b = frechet_bounds([0.5, 1.0], [0.5, 1.0])
    assert b.upper[0, 0] == 0.5
    assert b.lower[0, 0] == 0.0
    assert b.upper[1, 1] == b.lower[1, 1] == 1.0


def test_frechet_bounds_collapse_for_point_mass():
    fx = cdf_from_pmf([0.2, 0.3, 0.5])
    fy = cdf_from_pmf([0.0, 0.0, 1.0])
    b = frechet_bounds(fx, fy)
    np.testing.assert_allclose(b.lower, b.upper, atol=1e-15)


def test_frechet_bounds_bin_mismatch():
    with pytest.raises(ValueError):
        frechet_bounds([0.5, 1.0], [0.2, 0.6, 1.0])


def test_boundary_pmf_two_point():
    b = frechet_bounds([0.5, 1.0], [0.5, 1.0])
    np.testing.assert_allclose(boundary_pmf(b, "upper"), [[0.5, 0], [0, 0.5]])
    np.testing.assert_allclose(boundary_pmf(b, "lower"), [[0, 0.5], [0.5, 0]])


def test_boundary_pmf_point_masses():
    fx = cdf_from_pmf([0, 1, 0])
    fy = cdf_from_pmf([0, 0, 1])
    b = frechet_bounds(fx, fy)
    expected = np.zeros((3, 3))
    expected[1, 2] = 1.0
    np.testing.assert_allclose(boundary_pmf(b, "upper"), expected)
    np.testing.assert_allclose(boundary_pmf(b, "lower"), expected)


def test_hoeffding_two_point():
    fx = fy = np.array([0.5, 1.0])
    b = frechet_bounds(fx, fy)
    assert hoeffding_covariance(b.upper, fx, fy) == pytest.approx(0.25, abs=1e-15)
    assert hoeffding_covariance(b.lower, fx, fy) == pytest.approx(-0.25, abs=1e-15)
    assert hoeffding_covariance(np.outer(fx, fy), fx, fy) == 0.0


def _band(xs, ys, bins):
    return model_joint(np.asarray(xs), np.asarray(ys), bins)[3]


def test_band_identical_patches():
    xs = np.array([0, 1, 2, 3, 1, 2])
    joint, fx, fy, band = model_joint(xs, xs, 4)
    assert band.rho_upper == pytest.approx(1.0, abs=1e-12)
    assert band.rho == pytest.approx(band.rho_upper, abs=1e-12)
    b = frechet_bounds(cdf_from_pmf(fx), cdf_from_pmf(fy))
    np.testing.assert_array_equal(joint, boundary_pmf(b, "upper"))


def test_band_reversed_patches():
    xs = np.array([0, 1, 2, 3])
    band = _band(xs, xs[::-1], 4)
    # brute-force Pearson on the reversed pairing
    cov, sx, sy = brute.pearson(list(xs), list(xs[::-1]))
    assert cov / (sx * sy) == pytest.approx(-1.0)
    assert band.rho == band.rho_lower
    assert band.rho == pytest.approx(-1.0, abs=1e-12)


def test_band_constant_patch_is_degenerate():
    band = _band([2, 2, 2, 2], [0, 1, 2, 3], 4)
    assert band.degenerate
    assert band.rho == band.rho_lower == band.rho_upper == 0.0


def test_band_length_mismatch():
    fx = cdf_from_pmf([0.5, 0.5])
    with pytest.raises(ValueError):
        correlation_band([0, 1], [0, 1, 1], fx, fx, frechet_bounds(fx, fx))


def test_mixture_examples():
    fx = fy = np.array([0.5, 0.5])
    b = frechet_bounds(cdf_from_pmf(fx), cdf_from_pmf(fy))
    up, lo = boundary_pmf(b, "upper"), boundary_pmf(b, "lower")

    class Band:
        rho_upper, rho_lower, degenerate = 1.0, -1.0, False

    band = Band()
    band.rho = 0.5
    np.testing.assert_allclose(joint_pmf_model(band, up, lo, fx, fy), [[0.375, 0.125], [0.125, 0.375]], atol=1e-15)
    band.rho = 0.0
    np.testing.assert_array_equal(joint_pmf_model(band, up, lo, fx, fy), np.outer(fx, fy))
    band.rho = 1.0
    np.testing.assert_array_equal(joint_pmf_model(band, up, lo, fx, fy), up)


def test_mixture_brute_arithmetic():
    # 0.5 * diag(0.5, 0.5) + 0.5 * 0.25 everywhere, by hand
    expected = [[0.5 * 0.5 + 0.5 * 0.25, 0.5 * 0.25], [0.5 * 0.25, 0.5 * 0.5 + 0.5 * 0.25]]
    assert expected == [[0.375, 0.125], [0.125, 0.375]]


def test_mixture_weight_guard():
    fx = fy = np.array([0.5, 0.5])

    class Band:
        rho, rho_upper, rho_lower, degenerate = 0.9, 0.5, -1.0, False

    with pytest.raises(RuntimeError):
        joint_pmf_model(Band(), np.eye(2) / 2, np.fliplr(np.eye(2)) / 2, fx, fy)


@given(paired_indices())
def test_boundary_pmfs_are_valid_couplings(case):
    xs, ys, bins = case
    fx, fy = estimate_pmf(xs, bins), estimate_pmf(ys, bins)
    b = frechet_bounds(cdf_from_pmf(fx), cdf_from_pmf(fy))
    assert np.all(b.lower <= b.upper)
    assert np.all(np.diff(b.upper, axis=0) >= -1e-15) and np.all(np.diff(b.upper, axis=1) >= -1e-15)
    assert np.all(np.diff(b.lower, axis=0) >= -1e-15) and np.all(np.diff(b.lower, axis=1) >= -1e-15)
    for which in ("upper", "lower"):
        check_joint_pmf(boundary_pmf(b, which), fx, fy)


def _moment_cov(joint):
    k = np.arange(joint.shape[0])
    ex = (joint.sum(axis=1) * k).sum()
    ey = (joint.sum(axis=0) * k).sum()
    return (np.outer(k, k) * joint).sum() - ex * ey


@given(paired_indices())
def test_hoeffding_matches_coupling_moments(case):
    xs, ys, bins = case
    fx, fy = estimate_pmf(xs, bins), estimate_pmf(ys, bins)
    cx, cy = cdf_from_pmf(fx), cdf_from_pmf(fy)
    b = frechet_bounds(cx, cy)
    s_up = hoeffding_covariance(b.upper, cx, cy)
    s_lo = hoeffding_covariance(b.lower, cx, cy)
    assert s_up >= -1e-12 and s_lo <= 1e-12
    assert s_up == pytest.approx(_moment_cov(boundary_pmf(b, "upper")), abs=1e-8)
    assert s_lo == pytest.approx(_moment_cov(boundary_pmf(b, "lower")), abs=1e-8)


@given(paired_indices())
def test_model_joint_is_valid_and_banded(case):
    xs, ys, bins = case
    joint, fx, fy, band = model_joint(xs, ys, bins)
    check_joint_pmf(joint, fx, fy)
    assert band.rho_lower <= 0 <= band.rho_upper
    assert band.rho_lower <= band.rho <= band.rho_upper
    assert band.sigma_lower <= band.sigma_upper


@given(paired_indices(max_bins=6, max_len=9))
def test_model_joint_matches_brute(case):
    xs, ys, bins = case
    joint, _, _, band = model_joint(xs, ys, bins)
    ref, _, _, (rho, rho_l, rho_u) = brute.model(list(xs), list(ys), bins)
    np.testing.assert_allclose(joint, ref, rtol=0, atol=1e-10)
    assert band.rho == pytest.approx(rho, abs=1e-10)


def test_branch_continuity_at_zero():
    fx = np.array([0.2, 0.3, 0.5])
    fy = np.array([0.4, 0.4, 0.2])
    b = frechet_bounds(cdf_from_pmf(fx), cdf_from_pmf(fy))
    up, lo = boundary_pmf(b, "upper"), boundary_pmf(b, "lower")

    class Band:
        rho, rho_upper, rho_lower, degenerate = 0.0, 0.8, -0.7, False

    prod = np.outer(fx, fy)
    np.testing.assert_array_equal(joint_pmf_model(Band(), up, lo, fx, fy), prod)
    for eps in (1e-9, -1e-9):
        Band.rho = eps
        np.testing.assert_allclose(joint_pmf_model(Band(), up, lo, fx, fy), prod, atol=1e-8)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sampled_correlation_converges(seed):
    rng = np.random.default_rng(seed)
    bins = 8
    xs = rng.integers(0, bins, 49)
    ys = np.clip(xs + rng.integers(-2, 3, 49), 0, bins - 1)
    joint, _, _, band = model_joint(xs, ys, bins)
    flat = rng.choice(bins * bins, size=100_000, p=joint.ravel())
    sx, sy = np.divmod(flat, bins)
    emp = np.corrcoef(sx, sy)[0, 1]
    assert abs(emp - band.rho) < 0.02
    assert not math.isclose(band.rho, 0.0)
