"""The randomized image-to-binary-thin-edges transform, and the inference-
side sketch preprocessor.

Every random choice for a sample is drawn from a generator seeded with
(seed, image_id, index), so results depend only on those three values and
never on scheduling.  Draw order is fixed: source index, sigma (builtin
sources only), the six geometry fields, estimator.  All choices are logged
as a SampleDecision; re-running with the same triple reproduces the output
bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import binarize
from .detect import (
    BuiltinSource,
    ExternalSource,
    gradient_field,
    load_external_edge_map,
    orientation_from_map,
    pick_source,
)
from .errors import BlankSketchError, EmptyHistogramError
from .geom import GeomParams, GeomRanges, apply_geometry, sample_geom
from .image import as_gray, load_image
from .kernels import suppress_nonmax
from .thin import nms

DEFAULT_SCALES = (0.90, 0.65, 0.45)


@dataclass(frozen=True)
class PipelineSpec:
    """Configuration of the randomized transform."""

    sources: tuple = (BuiltinSource(),)
    geom: GeomRanges = GeomRanges()
    estimators: tuple = binarize.DEFAULT_POOL
    min_component: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.sources:
            raise ValueError("at least one edge source is required")
        if not self.estimators:
            raise ValueError("at least one estimator is required")

    def to_dict(self) -> dict:
        sources = []
        for s in self.sources:
            if isinstance(s, BuiltinSource):
                sources.append({"type": "builtin", "sigma_range": list(s.sigma_range)})
            else:
                sources.append(
                    {
                        "type": "external",
                        "tag": s.tag,
                        "directory": str(s.directory) if s.directory else None,
                        "suffix": s.suffix,
                    }
                )
        return {
            "seed": self.seed,
            "sources": sources,
            "geom": asdict(self.geom),
            "estimators": list(self.estimators),
            "min_component": self.min_component,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineSpec":
        sources = []
        for s in data.get("sources", [{"type": "builtin"}]):
            if s.get("type") == "builtin":
                sources.append(BuiltinSource(tuple(s.get("sigma_range", (1.0, 5.0)))))
            elif s.get("type") == "external":
                directory = s.get("directory")
                sources.append(
                    ExternalSource(
                        tag=s["tag"],
                        directory=Path(directory) if directory else None,
                        suffix=s.get("suffix", ".png"),
                    )
                )
            else:
                raise ValueError(f"unknown source type {s.get('type')!r}")
        g = data.get("geom", {})
        geom = GeomRanges(
            angle_deg=tuple(g.get("angle_deg", (-5.0, 5.0))),
            area_frac=tuple(g.get("area_frac", (0.8, 1.0))),
            aspect=tuple(g.get("aspect", (0.75, 4.0 / 3.0))),
            hflip_prob=float(g.get("hflip_prob", 0.5)),
            resize_side=int(g.get("resize_side", 256)),
            out_side=int(g.get("out_side", 224)),
        )
        return cls(
            sources=tuple(sources),
            geom=geom,
            estimators=tuple(data.get("estimators", binarize.DEFAULT_POOL)),
            min_component=int(data.get("min_component", 10)),
            seed=int(data.get("seed", 0)),
        )


def load_spec(path) -> PipelineSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return PipelineSpec.from_dict(json.load(fh))


def save_spec(spec: PipelineSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def sample_rng(seed: int, image_id: str, index: int) -> np.random.Generator:
    """Per-sample generator; independent of worker scheduling."""
    digest = hashlib.blake2b(
        f"{seed}\x1f{image_id}\x1f{index}".encode("utf-8"), digest_size=8
    ).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))


@dataclass(frozen=True)
class SampleDecision:
    """Log record of every random choice made for one sample."""

    image_id: str
    index: int
    source_index: int
    source: str
    sigma: float | None
    geom: GeomParams
    estimator: str | None
    threshold: float | None
    low: float | None
    high: float | None
    components_before: int
    components_after: int
    flags: tuple = ()

    def to_record(self) -> dict:
        # field order is fixed so the JSONL log diffs cleanly
        return {
            "image_id": self.image_id,
            "index": self.index,
            "source_index": self.source_index,
            "source": self.source,
            "sigma": self.sigma,
            "angle_deg": self.geom.angle_deg,
            "area_frac": self.geom.area_frac,
            "aspect": self.geom.aspect,
            "crop_x": self.geom.crop_x,
            "crop_y": self.geom.crop_y,
            "hflip": self.geom.hflip,
            "estimator": self.estimator,
            "threshold": self.threshold,
            "low": self.low,
            "high": self.high,
            "components_before": self.components_before,
            "components_after": self.components_after,
            "flags": list(self.flags),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SampleDecision":
        geom = GeomParams(
            angle_deg=rec["angle_deg"],
            area_frac=rec["area_frac"],
            aspect=rec["aspect"],
            crop_x=rec["crop_x"],
            crop_y=rec["crop_y"],
            hflip=rec["hflip"],
        )
        return cls(
            image_id=rec["image_id"],
            index=rec["index"],
            source_index=rec["source_index"],
            source=rec["source"],
            sigma=rec["sigma"],
            geom=geom,
            estimator=rec["estimator"],
            threshold=rec["threshold"],
            low=rec["low"],
            high=rec["high"],
            components_before=rec["components_before"],
            components_after=rec["components_after"],
            flags=tuple(rec["flags"]),
        )


def transform(img_path, spec: PipelineSpec, index: int = 0, image_id: str | None = None):
    """Run the full randomized transform on one image.

    Returns (binary map, SampleDecision).  An all-zero edge field degrades
    to an all-false map with an ``empty_histogram`` flag instead of
    raising.
    """
    image_id = str(img_path) if image_id is None else image_id
    rng = sample_rng(spec.seed, image_id, index)

    src_i = pick_source(spec.sources, rng)
    source = spec.sources[src_i]
    sigma = None
    if isinstance(source, BuiltinSource):
        lo, hi = source.sigma_range
        sigma = float(lo) if lo == hi else float(rng.uniform(lo, hi))
        field = gradient_field(as_gray(load_image(img_path)), sigma)
    else:
        field = load_external_edge_map(img_path, source)

    params = sample_geom(rng, spec.geom)
    field = apply_geometry(field, params, spec.geom)
    thinned = nms(field)
    method = binarize.pick_thresholder(rng, spec.estimators)

    side = spec.geom.out_side
    try:
        counts = binarize.histogram(thinned.strength, ignore_zeros=True)
    except EmptyHistogramError:
        decision = SampleDecision(
            image_id, index, src_i, source.label, sigma, params,
            method, None, None, None, 0, 0, flags=("empty_histogram",),
        )
        return np.zeros((side, side), dtype=bool), decision

    d = binarize.decide_threshold(counts, method)
    mask = binarize.hysteresis(thinned.strength, d.low, d.high)
    mask, before, after = binarize.filter_components(mask, spec.min_component)
    decision = SampleDecision(
        image_id, index, src_i, source.label, sigma, params,
        d.method, d.t, d.low, d.high, before, after,
    )
    return mask, decision


def log_decisions(decisions, path) -> None:
    """Append decisions to a JSON-lines file, one record per line."""
    with open(path, "a", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(json.dumps(d.to_record()) + "\n")


def read_decisions(path):
    """Parse a JSON-lines decision log back into SampleDecision objects."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(SampleDecision.from_record(json.loads(line)))
    return out


def pad_square_mask(mask: np.ndarray) -> np.ndarray:
    """Center a bool map on a square false canvas (floor split)."""
    h, w = mask.shape
    side = max(h, w)
    if h == w:
        return mask
    out = np.zeros((side, side), dtype=bool)
    top = (side - h) // 2
    left = (side - w) // 2
    out[top : top + h, left : left + w] = mask
    return out


def resize_binary(mask: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a bool map with coverage semantics: an output pixel is true
    iff any input pixel under its footprint is.  Thin strokes survive
    downscaling (bilinear-plus-threshold would erase them)."""
    mask = np.asarray(mask, dtype=bool)
    in_h, in_w = mask.shape
    if (out_h, out_w) == (in_h, in_w):
        return mask.copy()
    tmp = np.zeros((out_h, in_w), dtype=bool)
    for r in range(out_h):
        r0 = (r * in_h) // out_h
        r1 = max(r0 + 1, -((-(r + 1) * in_h) // out_h))
        tmp[r] = mask[r0:r1].any(axis=0)
    out = np.zeros((out_h, out_w), dtype=bool)
    for c in range(out_w):
        c0 = (c * in_w) // out_w
        c1 = max(c0 + 1, -((-(c + 1) * in_w) // out_w))
        out[:, c] = tmp[:, c0:c1].any(axis=1)
    return out


def _thin_sketch(sketch: np.ndarray, dark_on_light: bool) -> np.ndarray:
    s = as_gray(np.asarray(sketch, dtype=np.float64))
    if dark_on_light:
        s = 1.0 - s
    thinned, _ = suppress_nonmax(s, orientation_from_map(s))
    peak = thinned.max()
    if peak <= 0.0:
        return np.zeros(s.shape, dtype=bool)
    return thinned >= 0.5 * peak


def prep_sketch_single(
    sketch: np.ndarray, dark_on_light: bool = True, out_side: int = 224
) -> np.ndarray:
    """Thin a sketch and present it at its original relative size.

    Polarity is normalized to bright-on-dark, non-maxima are suppressed
    (orientation from the map's own gradients), the result is binarized at
    half its maximum, padded square and resized.  A blank page comes back
    all-false.
    """
    mask = _thin_sketch(sketch, dark_on_light)
    mask = pad_square_mask(mask)
    return resize_binary(mask, out_side, out_side)


def prep_sketch_multiscale(
    sketch: np.ndarray,
    scales=DEFAULT_SCALES,
    dark_on_light: bool = True,
    out_side: int = 224,
):
    """Thin a sketch and render it at several relative sizes.

    The thinned sketch is cropped to its bounding box, padded to a square,
    resized so the content side is round(scale * out_side), and centered
    on an out_side canvas.  Returns one map per scale; raises
    BlankSketchError when thinning leaves nothing.
    """
    mask = _thin_sketch(sketch, dark_on_light)
    if not mask.any():
        raise BlankSketchError("sketch has no edge pixels after thinning")
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    tight = mask[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
    square = pad_square_mask(tight)

    out = []
    for scale in scales:
        if not (0.0 < scale <= 1.0):
            raise ValueError(f"scales must lie in (0, 1], got {scale}")
        side = min(out_side, max(1, int(round(scale * out_side))))
        content = resize_binary(square, side, side)
        canvas = np.zeros((out_side, out_side), dtype=bool)
        off = (out_side - side) // 2
        canvas[off : off + side, off : off + side] = content
        out.append(canvas)
    return out
