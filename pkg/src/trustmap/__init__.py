"""Per-pixel confidence heat maps for fused and translated images."""

from .confidence import MapConfig, confidence_map, confidence_score, mean_confidence, patch_score
from .overlay import OverlayConfig, compose_fusion, compose_translation
from .perturb import NoiseSpec, apply_noise

__version__ = "0.1.0"

__all__ = [
    "MapConfig",
    "NoiseSpec",
    "OverlayConfig",
    "apply_noise",
    "compose_fusion",
    "compose_translation",
    "confidence_map",
    "confidence_score",
    "mean_confidence",
    "patch_score",
]
