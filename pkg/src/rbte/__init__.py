"""rbte: randomized binary thin edge generation.

Turns natural images (or precomputed edge maps) into binary, one-pixel
thick edge maps through a seeded, randomized chain of edge detection,
geometric augmentation, non-maximum suppression, auto-threshold hysteresis
and small-component removal.  Also ships manifest tooling for batch runs
and the matching inference-side sketch preprocessor.
"""

from .binarize import (
    ThresholdDecision,
    decide_threshold,
    histogram,
    hysteresis,
    remove_small_components,
)
from .detect import BuiltinSource, EdgeField, ExternalSource, gradient_field
from .geom import GeomParams, GeomRanges
from .image import load_image, save_binary, save_gray, to_grayscale
from .pipeline import (
    PipelineSpec,
    SampleDecision,
    prep_sketch_multiscale,
    prep_sketch_single,
    transform,
)
from .thin import ThinField, nms

__version__ = "0.1.0"

__all__ = [
    "BuiltinSource",
    "EdgeField",
    "ExternalSource",
    "GeomParams",
    "GeomRanges",
    "PipelineSpec",
    "SampleDecision",
    "ThinField",
    "ThresholdDecision",
    "decide_threshold",
    "gradient_field",
    "histogram",
    "hysteresis",
    "load_image",
    "nms",
    "prep_sketch_multiscale",
    "prep_sketch_single",
    "remove_small_components",
    "save_binary",
    "save_gray",
    "to_grayscale",
    "transform",
]
