"""Discrete marginal and joint distributions for paired patch vectors.

Every function accepts arrays with arbitrary leading batch axes so that a
single code path serves one patch pair or a whole image worth of windows.
Marginals have shape ``(..., B)``; joint grids have shape ``(..., B, B)``
with the source variable on the row axis and the target on the column axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Mixture weights this close to 0 or 1 are rounding noise around an exact endpoint.
WEIGHT_SNAP = 1e-12


@dataclass(frozen=True)
class JointCdfBounds:
    """Pointwise lower and upper Fréchet limits of the joint CDF."""

    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class CorrelationBand:
    rho: np.ndarray
    rho_lower: np.ndarray
    rho_upper: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_lower: np.ndarray
    sigma_upper: np.ndarray
    degenerate: np.ndarray


def quantize(values, bins: int) -> np.ndarray:
    """Map unit-interval intensities to bin indices on fixed global edges."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    v = np.asarray(values, dtype=float)
    if v.size and (np.nanmin(v) < 0.0 or np.nanmax(v) > 1.0 or np.isnan(v).any()):
        raise ValueError("intensities must lie in [0, 1]")
    return np.minimum(np.floor(v * bins).astype(np.intp), bins - 1)


def estimate_pmf(idx, bins: int) -> np.ndarray:
    """Histogram estimate of the marginal PMF along the last axis."""
    idx = np.asarray(idx)
    if idx.shape[-1] == 0:
        raise ValueError("cannot estimate a PMF from an empty vector")
    if idx.min() < 0 or idx.max() >= bins:
        raise ValueError(f"bin indices must lie in 0..{bins - 1}")
    counts = (idx[..., None] == np.arange(bins)).sum(axis=-2)
    return counts / idx.shape[-1]


def cdf_from_pmf(pmf) -> np.ndarray:
    # Prefix sums can overshoot 1 by an ulp, which would leak mass into
    # zero-probability rows of the lower Fréchet bound.
    return np.minimum(np.cumsum(np.asarray(pmf, dtype=float), axis=-1), 1.0)


def frechet_bounds(cdf_x, cdf_y) -> JointCdfBounds:
    cdf_x = np.asarray(cdf_x, dtype=float)
    cdf_y = np.asarray(cdf_y, dtype=float)
    if cdf_x.shape[-1] != cdf_y.shape[-1]:
        raise ValueError("marginal CDFs have different bin counts")
    fx = cdf_x[..., :, None]
    fy = cdf_y[..., None, :]
    upper = np.minimum(fx, fy)
    # max(a + b - 1, 0) <= min(a, b) exactly; rounding in a + b - 1 can break it.
    lower = np.minimum(np.maximum(fx + fy - 1.0, 0.0), upper)
    return JointCdfBounds(lower=lower, upper=upper)


def boundary_pmf(bounds: JointCdfBounds, which: str) -> np.ndarray:
    """Difference a boundary joint CDF into its joint PMF.

    ``which`` selects ``"upper"`` (comonotone coupling) or ``"lower"``
    (antimonotone coupling). Negative residues can only come from rounding;
    they are zeroed and the grid renormalized.
    """
    if which == "upper":
        grid = bounds.upper
    elif which == "lower":
        grid = bounds.lower
    else:
        raise ValueError(f"which must be 'upper' or 'lower', got {which!r}")
    pad = [(0, 0)] * (grid.ndim - 2) + [(1, 0), (1, 0)]
    padded = np.pad(grid, pad)
    mass = np.diff(np.diff(padded, axis=-2), axis=-1)
    mass = np.maximum(mass, 0.0)
    return mass / mass.sum(axis=(-2, -1), keepdims=True)


def hoeffding_covariance(grid, cdf_x, cdf_y) -> np.ndarray:
    """Covariance on the bin-index support from a joint CDF and its marginals."""
    grid = np.asarray(grid, dtype=float)
    cdf_x = np.asarray(cdf_x, dtype=float)
    cdf_y = np.asarray(cdf_y, dtype=float)
    if grid.shape[-2:] != (cdf_x.shape[-1], cdf_y.shape[-1]):
        raise ValueError("joint grid and marginal CDFs disagree on bin count")
    product = cdf_x[..., :, None] * cdf_y[..., None, :]
    return (grid - product).sum(axis=(-2, -1))


def correlation_band(xs, ys, cdf_x, cdf_y, bounds: JointCdfBounds) -> CorrelationBand:
    """Empirical Pearson correlation of paired bin indices and its Fréchet band.

    Moments use population (1/n) normalization. When either sample has zero
    variance the band is flagged degenerate and all correlations are zero.
    The empirical correlation is clamped into [rho_lower, rho_upper].
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError(f"paired vectors differ in shape: {xs.shape} vs {ys.shape}")

    dx = xs - xs.mean(axis=-1, keepdims=True)
    dy = ys - ys.mean(axis=-1, keepdims=True)
    sigma_x = np.sqrt((dx * dx).mean(axis=-1))
    sigma_y = np.sqrt((dy * dy).mean(axis=-1))
    cov = (dx * dy).mean(axis=-1)

    sigma_lower = hoeffding_covariance(bounds.lower, cdf_x, cdf_y)
    sigma_upper = hoeffding_covariance(bounds.upper, cdf_x, cdf_y)

    scale = sigma_x * sigma_y
    degenerate = scale == 0.0
    safe = np.where(degenerate, 1.0, scale)
    rho_lower = np.where(degenerate, 0.0, sigma_lower / safe)
    rho_upper = np.where(degenerate, 0.0, sigma_upper / safe)
    rho = np.where(degenerate, 0.0, cov / safe)
    rho = np.clip(rho, rho_lower, rho_upper)

    return CorrelationBand(
        rho=rho[()],
        rho_lower=rho_lower[()],
        rho_upper=rho_upper[()],
        sigma_x=sigma_x[()],
        sigma_y=sigma_y[()],
        sigma_lower=sigma_lower[()],
        sigma_upper=sigma_upper[()],
        degenerate=degenerate[()],
    )


def _snap_weight(w: np.ndarray) -> np.ndarray:
    w = np.where(np.abs(w) <= WEIGHT_SNAP, 0.0, w)
    return np.where(np.abs(w - 1.0) <= WEIGHT_SNAP, 1.0, w)


def joint_pmf_model(band: CorrelationBand, f_upper, f_lower, fx, fy) -> np.ndarray:
    """Mix a boundary coupling with the independent product according to rho.

    Positive correlation interpolates toward the comonotone PMF with weight
    rho / rho_upper, non-positive toward the antimonotone PMF with weight
    rho / rho_lower. Degenerate bands return the product.
    """
    fx = np.asarray(fx, dtype=float)
    fy = np.asarray(fy, dtype=float)
    product = fx[..., :, None] * fy[..., None, :]
    rho = np.asarray(band.rho, dtype=float)
    rho_u = np.asarray(band.rho_upper, dtype=float)
    rho_l = np.asarray(band.rho_lower, dtype=float)
    degenerate = np.asarray(band.degenerate, dtype=bool)

    positive = (rho > 0) & ~degenerate
    negative = (rho < 0) & ~degenerate
    if np.any(positive & (rho_u <= 0)):
        raise RuntimeError("positive correlation with a non-positive upper bound")
    if np.any(negative & (rho_l >= 0)):
        raise RuntimeError("negative correlation with a non-negative lower bound")

    with np.errstate(divide="ignore", invalid="ignore"):
        w_upper = np.where(positive, rho / rho_u, 0.0)
        w_lower = np.where(negative, rho / rho_l, 0.0)
    w_upper = _snap_weight(w_upper)
    w_lower = _snap_weight(w_lower)
    if np.any((w_upper < 0) | (w_upper > 1) | (w_lower < 0) | (w_lower > 1)):
        raise RuntimeError("mixture weight left [0, 1]; correlation band is inconsistent")

    wu = w_upper[..., None, None]
    wl = w_lower[..., None, None]
    return wu * f_upper + wl * f_lower + (1.0 - wu - wl) * product


def check_joint_pmf(joint, fx, fy, *, total_tol: float = 1e-9, marginal_tol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``joint`` is a valid PMF with marginals fx, fy."""
    joint = np.asarray(joint)
    if np.any(joint < 0):
        raise ValueError("joint PMF has negative mass")
    if np.any(np.abs(joint.sum(axis=(-2, -1)) - 1.0) > total_tol):
        raise ValueError("joint PMF does not sum to 1")
    if np.any(np.abs(joint.sum(axis=-1) - fx) > marginal_tol):
        raise ValueError("joint PMF row sums differ from the source marginal")
    if np.any(np.abs(joint.sum(axis=-2) - fy) > marginal_tol):
        raise ValueError("joint PMF column sums differ from the target marginal")


def model_joint(xs, ys, bins: int):
    """Run the full marginal -> bounds -> band -> mixture chain on bin indices.

    Returns ``(joint, fx, fy, band)``.
    """
    fx = estimate_pmf(xs, bins)
    fy = estimate_pmf(ys, bins)
    cx = cdf_from_pmf(fx)
    cy = cdf_from_pmf(fy)
    bounds = frechet_bounds(cx, cy)
    f_upper = boundary_pmf(bounds, "upper")
    f_lower = boundary_pmf(bounds, "lower")
    band = correlation_band(xs, ys, cx, cy, bounds)
    joint = joint_pmf_model(band, f_upper, f_lower, fx, fy)
    return joint, fx, fy, band
