"""Synthetic MRI/PET-like fixtures and a baseline fuser for end-to-end tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

MIN_SIZE = 32


@dataclass(frozen=True)
class SyntheticPair:
    structural: np.ndarray
    functional: np.ndarray
    seed: int


def make_synthetic_pair(width: int = 64, height: int = 64, seed: int = 0) -> SyntheticPair:
    """Build a sharp-edged structural image and a smooth functional image.

    The structural image is a textured background with random rectangles and
    ellipses. The functional image holds Gaussian-blurred disks, most of them
    centred on structural shapes so the two images share some layout.
    """
    if width < MIN_SIZE or height < MIN_SIZE:
        raise ValueError(f"synthetic images need at least {MIN_SIZE}x{MIN_SIZE} pixels")
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:height, 0:width]

    structural = np.full((height, width), 0.15)
    centers = []
    n_shapes = max(4, (width * height) // 512)
    for _ in range(n_shapes):
        cy = rng.uniform(0.1, 0.9) * height
        cx = rng.uniform(0.1, 0.9) * width
        ry = rng.uniform(0.06, 0.2) * height
        rx = rng.uniform(0.06, 0.2) * width
        level = rng.uniform(0.35, 0.95)
        if rng.random() < 0.5:
            inside = (np.abs(rows - cy) <= ry) & (np.abs(cols - cx) <= rx)
        else:
            inside = ((rows - cy) / ry) ** 2 + ((cols - cx) / rx) ** 2 <= 1.0
        structural[inside] = level
        centers.append((cy, cx))
    structural = structural + rng.normal(0.0, 0.04, size=structural.shape)
    structural = np.clip(structural, 0.0, 1.0)

    functional = np.zeros((height, width))
    for k in range(max(3, n_shapes // 2)):
        if k < len(centers) and rng.random() < 0.8:
            cy, cx = centers[k]
        else:
            cy = rng.uniform(0.1, 0.9) * height
            cx = rng.uniform(0.1, 0.9) * width
        radius = rng.uniform(0.08, 0.22) * min(width, height)
        disk = (rows - cy) ** 2 + (cols - cx) ** 2 <= radius**2
        functional[disk] += rng.uniform(0.3, 0.7)
    functional = ndimage.gaussian_filter(functional, sigma=0.06 * min(width, height), mode="mirror")
    functional = 0.05 + 0.9 * functional / max(float(functional.max()), 1e-12)
    functional = np.clip(functional, 0.0, 1.0)

    return SyntheticPair(structural=structural, functional=functional, seed=seed)


def average_fuse(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"cannot fuse images of shapes {a.shape} and {b.shape}")
    return (a + b) / 2.0


def independent_noise(shape, seed: int) -> np.ndarray:
    """Uniform noise image, independent of every fixture built from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, 0x5EED])).random(shape)


def gradient_energy(img: np.ndarray) -> float:
    gy, gx = np.gradient(np.asarray(img, dtype=float))
    return float(np.mean(gx**2 + gy**2))
