"""Normalized mutual-information confidence scores and sliding-window maps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .imgio import check_gray, pad_mirror
from .stats import check_joint_pmf, model_joint, quantize

# Scores within this distance of 0 or 1 are treated as the exact endpoint.
SCORE_SNAP = 1e-12

# Windows evaluated per vectorized block; bounds peak memory at about
# CHUNK * B * B * 8 bytes per intermediate grid.
CHUNK = 2048


@dataclass(frozen=True)
class MapConfig:
    W: int = 7
    B: int = 16
    border: str = "mirror"

    def __post_init__(self):
        if self.W < 1 or self.W % 2 == 0:
            raise ValueError(f"patch size W must be a positive odd integer, got {self.W}")
        if self.B < 2:
            raise ValueError(f"bin count B must be >= 2, got {self.B}")
        if self.border != "mirror":
            raise ValueError("only mirror borders are supported")


def _entropy_bits(p: np.ndarray, axes) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=axes)


def confidence_score(joint, fx, fy, *, tol: float = 1e-8):
    """Symmetric normalized mutual information 2 I(X;Y) / (H(X) + H(Y)).

    Entropies are in bits with 0 log 0 = 0. A zero denominator (both
    marginals are point masses) scores 0. Batched over leading axes.
    """
    joint = np.asarray(joint, dtype=float)
    fx = np.asarray(fx, dtype=float)
    fy = np.asarray(fy, dtype=float)
    if np.any(np.abs(joint.sum(axis=-1) - fx) > tol) or np.any(np.abs(joint.sum(axis=-2) - fy) > tol):
        raise ValueError("joint PMF marginals do not match fx, fy")

    product = fx[..., :, None] * fy[..., None, :]
    # Mass on a zero-product cell is bounded by the marginal check above;
    # it is rounding residue and must not reach log(x / 0).
    live = (joint > 0) & (product > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(live, joint / np.where(live, product, 1.0), 1.0)
    mi = np.where(live, joint * np.log2(ratio), 0.0).sum(axis=(-2, -1))
    denom = _entropy_bits(fx, -1) + _entropy_bits(fy, -1)

    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(denom > 0, 2.0 * mi / np.where(denom > 0, denom, 1.0), 0.0)
    score = np.clip(score, 0.0, 1.0)
    score = np.where(score >= 1.0 - SCORE_SNAP, 1.0, score)
    score = np.where(score <= SCORE_SNAP, 0.0, score)
    return score[()]


def patch_score(src_vec, tgt_vec, bins: int = 16, *, validate: bool = False):
    """Confidence of one or more flattened patch pairs of unit intensities."""
    xs = quantize(src_vec, bins)
    ys = quantize(tgt_vec, bins)
    joint, fx, fy, _ = model_joint(xs, ys, bins)
    if validate:
        check_joint_pmf(joint, fx, fy)
    return confidence_score(joint, fx, fy)


def _window_indices(img: np.ndarray, cfg: MapConfig) -> np.ndarray:
    r = cfg.W // 2
    idx = quantize(pad_mirror(img, r), cfg.B)
    windows = sliding_window_view(idx, (cfg.W, cfg.W))
    return windows.reshape(img.shape[0] * img.shape[1], cfg.W * cfg.W)


def constant_windows(img, cfg: MapConfig | None = None) -> np.ndarray:
    """True where the window around a pixel falls entirely in one intensity bin."""
    cfg = cfg or MapConfig()
    img = check_gray(img)
    idx = _window_indices(img, cfg)
    return (idx == idx[:, :1]).all(axis=1).reshape(img.shape)


def confidence_map(src, tgt, cfg: MapConfig | None = None, *, workers: int = 1) -> np.ndarray:
    """Per-pixel confidence between a source and a predicted target image.

    Each pixel scores the mirror-padded W x W windows centred on it, so the
    map has the input's shape. Blocks of windows are independent and may be
    evaluated on ``workers`` threads; the output does not depend on it.
    """
    cfg = cfg or MapConfig()
    src = check_gray(src, "source")
    tgt = check_gray(tgt, "target")
    if src.shape != tgt.shape:
        raise ValueError(f"source shape {src.shape} differs from target shape {tgt.shape}")

    xs_all = _window_indices(src, cfg)
    ys_all = _window_indices(tgt, cfg)
    out = np.empty(xs_all.shape[0])

    def run(start: int) -> None:
        stop = min(start + CHUNK, out.size)
        joint, fx, fy, _ = model_joint(xs_all[start:stop], ys_all[start:stop], cfg.B)
        out[start:stop] = confidence_score(joint, fx, fy)

    starts = range(0, out.size, CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return out.reshape(src.shape)


def mean_confidence(scores, mask=None) -> float:
    scores = np.asarray(scores, dtype=float)
    if mask is None:
        return float(scores.mean())
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != scores.shape:
        raise ValueError(f"mask shape {mask.shape} differs from map shape {scores.shape}")
    if not mask.any():
        raise ValueError("mask selects no pixels")
    return float(scores[mask].mean())


def save_matrix(scores, path) -> None:
    np.savetxt(path, np.asarray(scores, dtype=float), fmt="%.17g", delimiter=" ")


def load_matrix(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, dtype=float, delimiter=" "))
