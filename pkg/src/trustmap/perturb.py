"""Noise perturbations for the fused-image degradation experiment.

Random draws come from numpy's Philox4x32-10 counter-based generator seeded
with the NoiseSpec seed, so output is a pure function of (image, NoiseSpec).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

KINDS = ("gaussian", "poisson", "salt_pepper", "speckle", "blur")

DEFAULT_PARAMS = {
    "gaussian": {"mean": 0.0, "variance": 0.01},
    "poisson": {"scale": 255.0},
    "salt_pepper": {"density": 0.05},
    "speckle": {"variance": 0.05},
    "blur": {"sigma": 0.5},
}


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameter(s) for {self.kind}: {', '.join(sorted(unknown))}")
        merged = {**DEFAULT_PARAMS[self.kind], **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", merged)
        p = merged
        if "variance" in p and p["variance"] < 0:
            raise ValueError("noise variance must be non-negative")
        if "density" in p and not 0.0 <= p["density"] <= 1.0:
            raise ValueError("salt and pepper density must lie in [0, 1]")
        if "sigma" in p and p["sigma"] <= 0:
            raise ValueError("blur sigma must be positive")
        if "scale" in p and p["scale"] <= 0:
            raise ValueError("poisson count scale must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "NoiseSpec":
        """Parse ``kind`` or ``kind:key=value,key=value``."""
        kind, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"bad noise parameter {item!r} in {text!r}; expected key=value")
            params[key.strip()] = float(value)
        return cls(kind.strip(), params, seed)

    def label(self) -> str:
        extras = [f"{k}={v:g}" for k, v in self.params.items() if v != DEFAULT_PARAMS[self.kind][k]]
        return self.kind if not extras else f"{self.kind}:{','.join(extras)}"


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Sampled Gaussian of radius ceil(3 sigma), normalized to unit sum."""
    radius = max(1, math.ceil(3 * sigma))
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel1d(sigma)
    out = ndimage.correlate1d(img, k, axis=0, mode="mirror")
    return ndimage.correlate1d(out, k, axis=1, mode="mirror")


def apply_noise(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    img = np.asarray(img, dtype=float)
    p = spec.params
    rng = generator(spec.seed)
    if spec.kind == "gaussian":
        out = img + rng.normal(p["mean"], math.sqrt(p["variance"]), size=img.shape)
    elif spec.kind == "poisson":
        out = rng.poisson(img * p["scale"]) / p["scale"]
    elif spec.kind == "salt_pepper":
        hit = rng.random(img.shape) < p["density"]
        salt = rng.random(img.shape) < 0.5
        out = np.where(hit, np.where(salt, 1.0, 0.0), img)
    elif spec.kind == "speckle":
        out = img + rng.normal(0.0, math.sqrt(p["variance"]), size=img.shape) * img
    else:
        out = gaussian_blur(img, p["sigma"])
    return np.clip(out, 0.0, 1.0)


def default_noises(seed: int = 0) -> list[NoiseSpec]:
    """The five perturbations with default parameters, sharing one seed."""
    return [NoiseSpec(kind, seed=seed) for kind in KINDS]
