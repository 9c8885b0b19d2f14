"""Histogram thresholding, hysteresis binarization, component filtering.

All five estimators (Otsu, Yen, Li, isodata, mean) work on a 256-bin
histogram over [0, 1]: bin k covers [k/256, (k+1)/256), the last bin is
closed.  Otsu/Yen/Li scan all 256 split points exhaustively; ties break to
the smallest split index, and a histogram with a single occupied bin
returns that bin's right edge.  The estimators are deliberately plain
Python loops with sequential summation so their float behavior is easy to
pin down; at 256 bins per image this is nowhere near the hot path.

Thresholds drive hysteresis at low = 0.5*t and high = min(1.5*t, 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyHistogramError, NoConvergenceWarning

N_BINS = 256
_LI_EPS = 2.0**-52

DEFAULT_POOL = ("otsu", "yen", "li", "isodata", "mean")


def histogram(img: np.ndarray, ignore_zeros: bool = False) -> np.ndarray:
    """256-bin counts of a [0, 1] image.

    With ignore_zeros, pixels that are exactly 0 are dropped (suppressed
    output is zero-dominated and would drag every estimator toward 0).
    Raises EmptyHistogramError when nothing is left.
    """
    vals = np.asarray(img, dtype=np.float64).ravel()
    if ignore_zeros:
        vals = vals[vals > 0.0]
    if vals.size == 0:
        raise EmptyHistogramError("no pixels left to histogram")
    idx = np.minimum((vals * N_BINS).astype(np.int64), N_BINS - 1)
    return np.bincount(idx, minlength=N_BINS)


def _prepare(counts):
    c = [int(v) for v in counts]
    if len(c) != N_BINS:
        raise ValueError(f"expected {N_BINS} bins, got {len(c)}")
    total = sum(c)
    if total < 1:
        raise ValueError("histogram is empty")
    return c, float(total)


def _single_occupied(c):
    occupied = [k for k in range(N_BINS) if c[k]]
    if len(occupied) == 1:
        return (occupied[0] + 1) / N_BINS
    return None


def _weighted_sum(c):
    s = 0.0
    for k in range(N_BINS):
        s += c[k] * ((k + 0.5) / N_BINS)
    return s


def otsu(counts) -> float:
    """Split maximizing the between-class variance w0*w1*(mu0-mu1)^2."""
    c, total = _prepare(counts)
    t = _single_occupied(c)
    if t is not None:
        return t
    s_all = _weighted_sum(c)
    best_k = 0
    best = -math.inf
    w0 = 0.0
    s0 = 0.0
    for k in range(N_BINS - 1):
        w0 += c[k]
        s0 += c[k] * ((k + 0.5) / N_BINS)
        w1 = total - w0
        if w0 == 0.0 or w1 == 0.0:
            continue
        mu0 = s0 / w0
        mu1 = (s_all - s0) / w1
        val = w0 * w1 * (mu0 - mu1) ** 2
        if val > best:
            best = val
            best_k = k
    return (best_k + 1) / N_BINS


def yen(counts) -> float:
    """Split maximizing Yen's criterion, in the equivalent log-free form
    (W0*W1)^2 / (SS0*SS1) with SS the cumulative sums of squared counts."""
    c, total = _prepare(counts)
    t = _single_occupied(c)
    if t is not None:
        return t
    ss_all = 0.0
    for k in range(N_BINS):
        ss_all += c[k] * c[k]
    best_k = 0
    best = -math.inf
    w0 = 0.0
    ss0 = 0.0
    for k in range(N_BINS - 1):
        w0 += c[k]
        ss0 += c[k] * c[k]
        w1 = total - w0
        if w0 == 0.0 or w1 == 0.0:
            continue
        val = (w0 * w1) ** 2 / (ss0 * (ss_all - ss0))
        if val > best:
            best = val
            best_k = k
    return (best_k + 1) / N_BINS


def li(counts) -> float:
    """Split minimizing the cross-entropy -m0*log(mu0) - m1*log(mu1),
    scanned exhaustively; means get a 2^-52 shift inside the logs."""
    c, total = _prepare(counts)
    t = _single_occupied(c)
    if t is not None:
        return t
    s_all = _weighted_sum(c)
    best_k = 0
    best = math.inf
    w0 = 0.0
    s0 = 0.0
    for k in range(N_BINS - 1):
        w0 += c[k]
        s0 += c[k] * ((k + 0.5) / N_BINS)
        w1 = total - w0
        if w0 == 0.0 or w1 == 0.0:
            continue
        s1 = s_all - s0
        val = -s0 * math.log(s0 / w0 + _LI_EPS) - s1 * math.log(s1 / w1 + _LI_EPS)
        if val < best:
            best = val
            best_k = k
    return (best_k + 1) / N_BINS


def _isodata_step(c, t: float) -> float:
    wb = sb = wa = sa = 0.0
    for k in range(N_BINS):
        center = (k + 0.5) / N_BINS
        if center <= t:
            wb += c[k]
            sb += c[k] * center
        else:
            wa += c[k]
            sa += c[k] * center
    if wb == 0.0:
        mb = ma = sa / wa
    elif wa == 0.0:
        mb = ma = sb / wb
    else:
        mb = sb / wb
        ma = sa / wa
    return (mb + ma) / 2.0


def isodata(counts) -> float:
    """Ridler-Calvard fixed point: t = (mean below t + mean above t) / 2.

    Starts from the global mean and stops once the step drops below 1/512
    and the iterate is a fixed point to within 1/256 (a small step alone
    does not guarantee that when mass sits right at the moving boundary).
    Warns with NoConvergenceWarning, returning the last iterate, if 100
    iterations are not enough.
    """
    c, total = _prepare(counts)
    t = _weighted_sum(c) / total
    for _ in range(100):
        t_new = _isodata_step(c, t)
        if abs(t_new - t) < 1.0 / 512.0:
            if abs(_isodata_step(c, t_new) - t_new) < 1.0 / N_BINS:
                return t_new
        t = t_new
    warnings.warn("isodata did not converge in 100 iterations", NoConvergenceWarning)
    return t


def mean_threshold(counts) -> float:
    """Histogram mean (bin centers weighted by counts)."""
    c, total = _prepare(counts)
    return _weighted_sum(c) / total


ESTIMATORS = {
    "otsu": otsu,
    "yen": yen,
    "li": li,
    "isodata": isodata,
    "mean": mean_threshold,
}


def pick_thresholder(rng: np.random.Generator, pool=DEFAULT_POOL) -> str:
    """Uniform choice from the estimator pool."""
    if not pool:
        raise ValueError("estimator pool is empty")
    for name in pool:
        if name not in ESTIMATORS:
            raise ValueError(f"unknown estimator {name!r}")
    return pool[int(rng.integers(0, len(pool)))]


@dataclass(frozen=True)
class ThresholdDecision:
    """Estimated threshold plus the derived hysteresis levels."""

    method: str
    t: float
    low: float
    high: float

    @classmethod
    def from_threshold(cls, method: str, t: float) -> "ThresholdDecision":
        return cls(method, t, 0.5 * t, min(1.5 * t, 1.0))


def decide_threshold(counts, method: str) -> ThresholdDecision:
    """Run one estimator and derive the low/high hysteresis levels."""
    return ThresholdDecision.from_threshold(method, ESTIMATORS[method](counts))


def hysteresis(strength: np.ndarray, low: float, high: float) -> np.ndarray:
    """Two-threshold binarization: a pixel is kept if it reaches high, or
    reaches low and is 8-connected through >= low pixels to one that does."""
    return kernels.hysteresis_mask(strength, low, high)


def filter_components(mask: np.ndarray, min_size: int):
    """Drop 8-connected components below min_size; also report the
    component counts before and after."""
    return kernels.filter_small_components(mask, min_size)


def remove_small_components(mask: np.ndarray, min_size: int = 10) -> np.ndarray:
    """Clear every 8-connected component smaller than min_size pixels."""
    out, _, _ = kernels.filter_small_components(mask, min_size)
    return out
