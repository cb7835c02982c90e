"""Image loading, saving, mirror padding and patch extraction.

Gray images are 2-D float64 arrays of shape (height, width) with values in
[0, 1]; overlays are (height, width, 3) arrays in the same range.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image


class PatchPair(NamedTuple):
    source: np.ndarray
    target: np.ndarray
    center: tuple[int, int]


def check_gray(img: np.ndarray, name: str = "image") -> np.ndarray:
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {img.shape}")
    if np.isnan(img).any() or img.min() < 0.0 or img.max() > 1.0:
        raise ValueError(f"{name} intensities must lie in [0, 1]")
    return img


def normalize_range(img: np.ndarray) -> np.ndarray:
    """Stretch intensities to span [0, 1]; constant images map to zeros."""
    lo, hi = float(img.min()), float(img.max())
    if hi == lo:
        return np.zeros_like(img, dtype=float)
    return (img - lo) / (hi - lo)


def load_gray(path, normalize: bool = False) -> np.ndarray:
    """Read an 8-bit grayscale or RGB image as unit-interval intensities.

    RGB(A) inputs are reduced to gray by averaging the three color channels.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("L", "P"):
                arr = np.asarray(im.convert("L"), dtype=float)
            elif mode in ("RGB", "RGBA"):
                arr = np.asarray(im.convert("RGB"), dtype=float).mean(axis=2)
            else:
                raise ValueError(f"{path}: unsupported image mode {mode!r}, need 8-bit gray or RGB")
    except OSError as exc:
        raise OSError(f"cannot read image {path}: {exc}") from exc
    img = arr / 255.0
    return normalize_range(img) if normalize else img


def to_bytes(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=float)
    if img.size and (img.min() < 0.0 or img.max() > 1.0):
        raise ValueError("intensities must lie in [0, 1] before saving")
    # floor(x + 0.5) so that exact halves round up, 0.5 -> 128.
    return np.floor(img * 255.0 + 0.5).astype(np.uint8)


def save_png(img: np.ndarray, path) -> None:
    """Write a gray (H, W) or RGB (H, W, 3) unit-interval image as 8-bit PNG."""
    data = to_bytes(img)
    if data.ndim == 2:
        out = Image.fromarray(data, mode="L")
    elif data.ndim == 3 and data.shape[2] == 3:
        out = Image.fromarray(data, mode="RGB")
    else:
        raise ValueError(f"cannot save array of shape {data.shape} as PNG")
    out.save(Path(path), format="PNG")


def pad_mirror(img: np.ndarray, margin: int) -> np.ndarray:
    """Pad by reflection about the edge pixels: [a, b, c] -> [b, a, b, c, b]."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if margin == 0:
        return np.array(img, copy=True)
    if margin >= min(img.shape[:2]):
        raise ValueError(f"margin {margin} too large for image of shape {img.shape[:2]}")
    return np.pad(img, margin, mode="reflect")


def extract_patch_pair(src: np.ndarray, tgt: np.ndarray, center: tuple[int, int], W: int) -> PatchPair:
    if src.shape != tgt.shape:
        raise ValueError(f"source shape {src.shape} differs from target shape {tgt.shape}")
    if W < 1 or W % 2 == 0:
        raise ValueError(f"patch size must be a positive odd integer, got {W}")
    r = W // 2
    row, col = center
    if row - r < 0 or col - r < 0 or row + r >= src.shape[0] or col + r >= src.shape[1]:
        raise ValueError(f"window of size {W} at {center} does not fit in {src.shape}")
    window = (slice(row - r, row + r + 1), slice(col - r, col + r + 1))
    return PatchPair(src[window].ravel(), tgt[window].ravel(), (row, col))
