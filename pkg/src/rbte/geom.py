"""Geometric augmentation of edge fields.

The chain mirrors common CNN input augmentation, applied to edge fields
rather than RGB images: center-pad to square, resample to 256, rotate by a
small random angle, random resized crop to 224, horizontal flip.  Strength
is interpolated bilinearly; orientation is sampled nearest-neighbor
(interpolating angles across the pi fold is meaningless) and corrected for
rotation/flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import EdgeField, fold_angle


@dataclass(frozen=True)
class GeomRanges:
    """Sampling ranges and output sides for the augmentation chain."""

    angle_deg: tuple = (-5.0, 5.0)
    area_frac: tuple = (0.8, 1.0)
    aspect: tuple = (0.75, 4.0 / 3.0)
    hflip_prob: float = 0.5
    resize_side: int = 256
    out_side: int = 224


@dataclass(frozen=True)
class GeomParams:
    """One sampled draw of the augmentation parameters."""

    angle_deg: float
    area_frac: float
    aspect: float
    crop_x: float
    crop_y: float
    hflip: bool


def _uniform(rng, lo, hi):
    if lo == hi:
        return float(lo)
    return float(rng.uniform(lo, hi))


def _log_uniform(rng, lo, hi):
    if lo == hi:
        return float(lo)
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def sample_geom(rng: np.random.Generator, ranges: GeomRanges) -> GeomParams:
    """Draw augmentation parameters; fixed draw order, 6 draws always."""
    angle = _uniform(rng, *ranges.angle_deg)
    area = _uniform(rng, *ranges.area_frac)
    aspect = _log_uniform(rng, *ranges.aspect)
    crop_x = float(rng.uniform(0.0, 1.0))
    crop_y = float(rng.uniform(0.0, 1.0))
    hflip = bool(rng.random() < ranges.hflip_prob)
    return GeomParams(angle, area, aspect, crop_x, crop_y, hflip)


def pad_to_square(field: EdgeField) -> EdgeField:
    """Zero-pad to side max(h, w), content centered with a floor split."""
    h, w = field.shape
    side = max(h, w)
    if h == w:
        return field
    top = (side - h) // 2
    left = (side - w) // 2
    strength = np.zeros((side, side), dtype=np.float64)
    orientation = np.zeros((side, side), dtype=np.float64)
    strength[top : top + h, left : left + w] = field.strength
    orientation[top : top + h, left : left + w] = field.orientation
    return EdgeField(strength, orientation)


def _resample(field: EdgeField, out_h: int, out_w: int) -> EdgeField:
    # half-pixel centers (align_corners=False); coordinates clamp at borders
    in_h, in_w = field.shape
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    ys = np.clip(ys, 0.0, in_h - 1.0)
    xs = np.clip(xs, 0.0, in_w - 1.0)

    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]

    s = field.strength
    top = s[y0[:, None], x0] * (1.0 - fx) + s[y0[:, None], x1] * fx
    bot = s[y1[:, None], x0] * (1.0 - fx) + s[y1[:, None], x1] * fx
    strength = np.clip(top * (1.0 - fy) + bot * fy, 0.0, 1.0)

    yn = np.clip(np.floor(ys + 0.5), 0, in_h - 1).astype(np.intp)
    xn = np.clip(np.floor(xs + 0.5), 0, in_w - 1).astype(np.intp)
    orientation = field.orientation[yn[:, None], xn]
    return EdgeField(strength, orientation)


def resize_bilinear(field: EdgeField, side: int) -> EdgeField:
    """Resample a square field to side x side."""
    h, w = field.shape
    if h != w:
        raise ValueError(f"expected square field, got {h}x{w}")
    return _resample(field, side, side)


def rotate(field: EdgeField, angle_deg: float) -> EdgeField:
    """Rotate about the image center; positive angles turn content
    counterclockwise on screen.

    Strength is bilinear-sampled with out-of-bounds reads as 0;
    orientation is nearest-sampled and shifted by -angle, folded to
    [0, pi).
    """
    if abs(angle_deg) > 45.0:
        raise ValueError(f"|angle| must be <= 45, got {angle_deg}")
    if angle_deg == 0.0:
        return field
    h, w = field.shape
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0

    dy, dx = np.meshgrid(
        np.arange(h, dtype=np.float64) - cy,
        np.arange(w, dtype=np.float64) - cx,
        indexing="ij",
    )
    # inverse map of the on-screen CCW rotation (y axis points down)
    src_x = cx + cos_t * dx - sin_t * dy
    src_y = cy + sin_t * dx + cos_t * dy

    x0 = np.floor(src_x).astype(np.intp)
    y0 = np.floor(src_y).astype(np.intp)
    fx = src_x - x0
    fy = src_y - y0

    s = field.strength
    strength = np.zeros((h, w), dtype=np.float64)
    for oy, wy in ((0, 1.0 - fy), (1, fy)):
        for ox, wx in ((0, 1.0 - fx), (1, fx)):
            yy = y0 + oy
            xx = x0 + ox
            ok = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
            vals = np.where(ok, s[np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)], 0.0)
            strength += wy * wx * vals

    yn = np.floor(src_y + 0.5).astype(np.intp)
    xn = np.floor(src_x + 0.5).astype(np.intp)
    inside = (yn >= 0) & (yn < h) & (xn >= 0) & (xn < w)
    samp = np.where(
        inside, field.orientation[np.clip(yn, 0, h - 1), np.clip(xn, 0, w - 1)], 0.0
    )
    orientation = np.where(inside, fold_angle(samp - theta), 0.0)
    return EdgeField(strength, orientation)


def crop_dims(side: int, area_frac: float, aspect: float):
    """Crop width/height for a square frame; clamps the long side to the
    frame and recomputes the other from the area when infeasible."""
    area = area_frac * side * side
    w = math.sqrt(area * aspect)
    h = math.sqrt(area / aspect)
    if w > side:
        w = float(side)
        h = area / side
    if h > side:
        h = float(side)
        w = area / side
    wi = min(side, max(1, int(round(w))))
    hi = min(side, max(1, int(round(h))))
    return wi, hi


def random_resized_crop(field: EdgeField, params: GeomParams, out_side: int = 224) -> EdgeField:
    """Crop a rectangle of the sampled area/aspect and resample to out_side."""
    h, w = field.shape
    if h != w:
        raise ValueError(f"expected square field, got {h}x{w}")
    if h < 8:
        raise ValueError(f"field side must be >= 8, got {h}")
    cw, ch = crop_dims(h, params.area_frac, params.aspect)
    x0 = int(round(params.crop_x * (w - cw)))
    y0 = int(round(params.crop_y * (h - ch)))
    sub = EdgeField(
        field.strength[y0 : y0 + ch, x0 : x0 + cw],
        field.orientation[y0 : y0 + ch, x0 : x0 + cw],
    )
    return _resample(sub, out_side, out_side)


def hflip(field: EdgeField, flag: bool) -> EdgeField:
    """Mirror columns; orientation maps to (pi - angle) mod pi."""
    if not flag:
        return field
    strength = field.strength[:, ::-1].copy()
    orientation = fold_angle(np.pi - field.orientation[:, ::-1])
    return EdgeField(strength, orientation)


def apply_geometry(field: EdgeField, params: GeomParams, ranges: GeomRanges) -> EdgeField:
    """Full chain: pad -> resize -> rotate -> crop -> flip."""
    out = pad_to_square(field)
    out = resize_bilinear(out, ranges.resize_side)
    out = rotate(out, params.angle_deg)
    out = random_resized_crop(out, params, ranges.out_side)
    out = hflip(out, params.hflip)
    return out
