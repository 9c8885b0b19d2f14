"""Non-maximum suppression along quantized gradient directions.

A pixel survives only if it is strictly greater than both of its neighbors
across the edge (along the gradient), with the orientation quantized to
four directions.  The strict inequality means perfectly flat ridges and
plateaus are suppressed entirely; neighbor reads past the border clamp to
the border pixel itself, so border pixels whose gradient points outward
never survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .detect import EdgeField


@dataclass(frozen=True)
class ThinField:
    """Suppressed strength plus the direction bin used per pixel."""

    strength: np.ndarray
    direction_bins: np.ndarray

    @property
    def shape(self):
        return self.strength.shape


def nms(field: EdgeField) -> ThinField:
    """Suppress non-maxima of an edge field along its gradient directions."""
    suppressed, bins = kernels.suppress_nonmax(field.strength, field.orientation)
    return ThinField(suppressed, bins)
