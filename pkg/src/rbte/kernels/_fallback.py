"""Numpy/scipy implementations of the hot kernels.

Must stay observably identical to the compiled backend: same binning
arithmetic (multiply by 4/pi, add 0.5, floor), same strict-inequality
suppression with replicate borders, same connectivity semantics.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

_BIN_SCALE = 4.0 / np.pi
_EIGHT = np.ones((3, 3), dtype=bool)


def _direction_bins(orientation: np.ndarray) -> np.ndarray:
    bins = np.floor(orientation * _BIN_SCALE + 0.5).astype(np.int8)
    bins %= 4
    return bins


def suppress_nonmax(strength: np.ndarray, orientation: np.ndarray):
    """Keep pixels strictly greater than both neighbors along the gradient.

    Out-of-bounds neighbor reads clamp to the border pixel itself, so a
    border pixel whose gradient points outward can never survive.
    """
    s = np.ascontiguousarray(strength, dtype=np.float64)
    o = np.ascontiguousarray(orientation, dtype=np.float64)
    bins = _direction_bins(o)

    padded = np.pad(s, 1, mode="edge")
    keep = np.zeros(s.shape, dtype=bool)
    for b, (dr, dc) in enumerate(((0, 1), (1, 1), (1, 0), (1, -1))):
        fwd = padded[1 + dr : 1 + dr + s.shape[0], 1 + dc : 1 + dc + s.shape[1]]
        bwd = padded[1 - dr : 1 - dr + s.shape[0], 1 - dc : 1 - dc + s.shape[1]]
        keep |= (bins == b) & (s > fwd) & (s > bwd)
    out = np.where(keep, s, 0.0)
    return out, bins


def hysteresis_mask(strength: np.ndarray, low: float, high: float) -> np.ndarray:
    """True where strength >= high, or >= low and 8-connected to >= high."""
    s = np.asarray(strength, dtype=np.float64)
    weak = s >= low
    strong = s >= high
    if not strong.any():
        return np.zeros(s.shape, dtype=bool)
    labels, n = ndimage.label(weak, structure=_EIGHT)
    keep = np.zeros(n + 1, dtype=bool)
    keep[labels[strong]] = True
    keep[0] = False
    return keep[labels]


def filter_small_components(mask: np.ndarray, min_size: int):
    """Clear 8-connected components smaller than min_size.

    Returns (filtered mask, component count before, component count after).
    """
    m = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(m, structure=_EIGHT)
    if n == 0:
        return np.zeros(m.shape, dtype=bool), 0, 0
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    keep = sizes >= min_size
    keep[0] = False
    return keep[labels], int(n), int(keep.sum())
