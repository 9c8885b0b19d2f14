"""Edge-strength fields: built-in gradient detector and external edge maps.

External maps (e.g. outputs of learned detectors saved to disk) are
first-class inputs; they are grayscale siblings of the image named
``<stem>.<tag>.png``.  Since those files carry no angle information, the
orientation needed by non-maximum suppression is recovered from smoothed
Sobel gradients of the map itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import MissingEdgeMapError
from .image import as_gray, load_image


@dataclass(frozen=True)
class EdgeField:
    """Edge strength in [0, 1] plus per-pixel gradient angle in [0, pi)."""

    strength: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        if self.strength.shape != self.orientation.shape:
            raise ValueError(
                f"strength {self.strength.shape} and orientation "
                f"{self.orientation.shape} shapes differ"
            )

    @property
    def shape(self):
        return self.strength.shape


@dataclass(frozen=True)
class BuiltinSource:
    """Gradient detector with Gaussian smoothing, sigma drawn per sample."""

    sigma_range: tuple = (1.0, 5.0)

    def __post_init__(self):
        lo, hi = self.sigma_range
        if not (0 < lo <= hi):
            raise ValueError(f"invalid sigma range {self.sigma_range}")

    label = "builtin"


@dataclass(frozen=True)
class ExternalSource:
    """Precomputed edge maps stored next to the image (or in a directory)."""

    tag: str
    directory: Path | None = None
    suffix: str = ".png"

    @property
    def label(self):
        return self.tag

    def edge_path(self, img_path) -> Path:
        img_path = Path(img_path)
        base = Path(self.directory) if self.directory else img_path.parent
        return base / f"{img_path.stem}.{self.tag}{self.suffix}"


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Truncated Gaussian, radius ceil(3*sigma), renormalized to sum 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _smooth(img: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def _sobel(img: np.ndarray):
    diff = np.array([-1.0, 0.0, 1.0])
    avg = np.array([1.0, 2.0, 1.0])
    gx = ndimage.correlate1d(img, diff, axis=1, mode="nearest")
    gx = ndimage.correlate1d(gx, avg, axis=0, mode="nearest")
    gy = ndimage.correlate1d(img, diff, axis=0, mode="nearest")
    gy = ndimage.correlate1d(gy, avg, axis=1, mode="nearest")
    return gx, gy


def fold_angle(angle: np.ndarray) -> np.ndarray:
    """Map angles into [0, pi); the fold identifies opposite gradients."""
    out = np.mod(angle, np.pi)
    # np.mod can land exactly on pi for tiny negative inputs
    return np.where(out >= np.pi, 0.0, out)


def gradient_field(img: np.ndarray, sigma: float) -> EdgeField:
    """Gaussian-smoothed Sobel gradients of a grayscale image.

    Strength is the gradient magnitude normalized by its global maximum
    (all zeros when the image is constant); orientation is the gradient
    angle folded into [0, pi).  Borders replicate.
    """
    img = np.asarray(img, dtype=np.float64)
    gx, gy = _sobel(_smooth(img, sigma))
    strength = np.hypot(gx, gy)
    peak = strength.max()
    if peak > 0:
        strength = strength / peak
    else:
        strength = np.zeros_like(strength)
    return EdgeField(strength, fold_angle(np.arctan2(gy, gx)))


def orientation_from_map(strength: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """Orientation of an edge map that carries no angles of its own."""
    gx, gy = _sobel(_smooth(np.asarray(strength, dtype=np.float64), sigma))
    return fold_angle(np.arctan2(gy, gx))


def load_external_edge_map(img_path, source: ExternalSource) -> EdgeField:
    """Load the sibling edge map for an image from an external source."""
    edge_path = source.edge_path(img_path)
    if not edge_path.is_file():
        raise MissingEdgeMapError(img_path, source.tag, edge_path)
    strength = as_gray(load_image(edge_path))
    return EdgeField(strength, orientation_from_map(strength))


def pick_source(sources, rng: np.random.Generator) -> int:
    """Uniform index into a non-empty source list."""
    if not sources:
        raise ValueError("source list is empty")
    return int(rng.integers(0, len(sources)))
