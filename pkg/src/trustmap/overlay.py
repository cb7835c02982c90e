"""RGB compositing of confidence maps onto the predicted image."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative luminance weights for linear RGB (Rec. 709).
LUMA = np.array([0.2126, 0.7152, 0.0722])

# Dominance classes of a two-map overlay, keyed by (red map high, green map high).
DOMINANCE = {
    (False, False): "blue",
    (True, False): "magenta",
    (False, True): "cyan",
    (True, True): "white",
}


@dataclass(frozen=True)
class OverlayConfig:
    alpha: float = 0.7

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def _compose(red_map, green_map, base, alpha: float) -> np.ndarray:
    red_map = np.asarray(red_map, dtype=float)
    green_map = np.asarray(green_map, dtype=float)
    base = np.asarray(base, dtype=float)
    if not red_map.shape == green_map.shape == base.shape:
        raise ValueError(
            f"overlay inputs differ in shape: {red_map.shape}, {green_map.shape}, {base.shape}"
        )
    r = alpha * red_map + (1 - alpha) * base
    g = alpha * green_map + (1 - alpha) * base
    return np.stack([r, g, base], axis=-1)


def compose_fusion(s_mri, s_pet, fused, cfg: OverlayConfig | None = None) -> np.ndarray:
    """Red carries the structural-source map, green the functional-source map, blue the fused image."""
    cfg = cfg or OverlayConfig()
    return _compose(s_mri, s_pet, fused, cfg.alpha)


def compose_translation(s_t2, s_t1, predicted, cfg: OverlayConfig | None = None) -> np.ndarray:
    """Red carries confidence toward the source domain, green toward the reference.

    Cyan marks faithful translation, blue low confidence either way, and
    magenta leakage of the source into the prediction.
    """
    cfg = cfg or OverlayConfig()
    return _compose(s_t2, s_t1, predicted, cfg.alpha)


def classify_dominance(red_map, green_map, threshold: float = 0.5) -> np.ndarray:
    """Label each pixel blue, magenta, cyan or white by which maps exceed ``threshold``."""
    hi_r = np.asarray(red_map) >= threshold
    hi_g = np.asarray(green_map) >= threshold
    labels = np.empty(hi_r.shape, dtype=object)
    for (r, g), name in DOMINANCE.items():
        labels[(hi_r == r) & (hi_g == g)] = name
    return labels


def dominance_fractions(red_map, green_map, threshold: float = 0.5) -> dict[str, float]:
    labels = classify_dominance(red_map, green_map, threshold)
    return {name: float(np.mean(labels == name)) for name in DOMINANCE.values()}


def nearest_corner(rgb) -> np.ndarray:
    """Round each channel to the nearest RGB cube corner."""
    return (np.asarray(rgb) >= 0.5).astype(int)


def colormap_gray_to_heat(scores) -> np.ndarray:
    """Render a score map through matplotlib's viridis ramp (dark blue at 0, yellow at 1)."""
    from matplotlib import colormaps

    scores = np.clip(np.asarray(scores, dtype=float), 0.0, 1.0)
    return colormaps["viridis"](scores)[..., :3]


def luminance(rgb) -> np.ndarray:
    return np.asarray(rgb, dtype=float) @ LUMA
