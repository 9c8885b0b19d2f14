"""Hot per-pixel kernels with a compiled core and a numpy fallback.

The compiled backend (``rbte.kernels._native``, Cython) is preferred; when
it is missing, or when ``RBTE_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy/scipy fallback is used.  Both backends produce
bit-identical outputs (all kernels reduce to comparisons and integer
bookkeeping, never float accumulation).

Exported functions:

``suppress_nonmax(strength, orientation) -> (suppressed, direction_bins)``
``hysteresis_mask(strength, low, high) -> bool mask``
``filter_small_components(mask, min_size) -> (mask, n_before, n_after)``
"""

import importlib
import os

from . import _fallback

_impl = _fallback
if os.environ.get("RBTE_PURE_PYTHON", "0") in ("", "0"):
    try:
        _impl = importlib.import_module("rbte.kernels._native")
    except ImportError:
        pass

BACKEND = "fallback" if _impl is _fallback else "native"

suppress_nonmax = _impl.suppress_nonmax
hysteresis_mask = _impl.hysteresis_mask
filter_small_components = _impl.filter_small_components

# Neighbor steps for the four quantized gradient directions
# (0, pi/4, pi/2, 3pi/4), in (row, col) with row pointing down.
DIRECTION_STEPS = ((0, 1), (1, 1), (1, 0), (1, -1))
