"""Raster types and file I/O.

Images are plain numpy arrays: grayscale maps are float64 ``(H, W)`` with
values in [0, 1], RGB images are float64 ``(H, W, 3)`` in [0, 1], and binary
maps are bool ``(H, W)``.  Supported formats are PNG (8/16-bit gray, 8-bit
RGB) and PGM/PPM; binary maps round-trip bit-exactly through both.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import RbteError, UnsupportedImageError

# ITU-R BT.601 luma weights.
_LUMA = (0.299, 0.587, 0.114)


def load_image(path) -> np.ndarray:
    """Load an image as float64 in [0, 1].

    8-bit channels are divided by 255, 16-bit by 65535.  Single-channel
    files come back as ``(H, W)``, color files as ``(H, W, 3)``.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "1":
                im = im.convert("L")
                mode = "L"
            elif mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            elif mode == "LA":
                im = im.convert("L")
                mode = "L"
            elif mode == "RGBA":
                im = im.convert("RGB")
                mode = "RGB"
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError) as e:
        raise RbteError(f"cannot read image {path}: {e}") from e

    if arr.size == 0:
        raise RbteError(f"zero-dimension image: {path}")

    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode in ("I", "I;16"):
        arr = arr.astype(np.int64)
        if arr.min() < 0 or arr.max() > 65535:
            raise UnsupportedImageError(f"{path}: values outside 16-bit range")
        return arr.astype(np.float64) / 65535.0
    if mode == "RGB":
        return arr.astype(np.float64) / 255.0
    raise UnsupportedImageError(f"{path}: unsupported mode {mode!r}")


def save_binary(mask: np.ndarray, path) -> None:
    """Write a bool map as an 8-bit single-channel file, True -> 255."""
    mask = np.asarray(mask, dtype=bool)
    out = np.where(mask, np.uint8(255), np.uint8(0))
    _save_array(out, path)


def save_gray(img: np.ndarray, path, bits: int = 8) -> None:
    """Write a [0, 1] grayscale map quantized to 8 or 16 bits (rounded)."""
    img = np.asarray(img, dtype=np.float64)
    if bits == 8:
        q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    elif bits == 16:
        q = np.rint(np.clip(img, 0.0, 1.0) * 65535.0).astype(np.uint16)
    else:
        raise ValueError(f"bits must be 8 or 16, got {bits}")
    _save_array(q, path)


def _save_array(arr: np.ndarray, path) -> None:
    path = Path(path)
    try:
        Image.fromarray(arr).save(path)
    except OSError:
        raise
    except ValueError as e:
        raise RbteError(f"cannot encode {path}: {e}") from e


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luma of an ``(H, W, 3)`` image, clamped to [0, 1]."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got shape {img.shape}")
    luma = _LUMA[0] * img[..., 0] + _LUMA[1] * img[..., 1] + _LUMA[2] * img[..., 2]
    return np.clip(luma, 0.0, 1.0)


def as_gray(img: np.ndarray) -> np.ndarray:
    """Pass grayscale through, collapse RGB via :func:`to_grayscale`."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    return to_grayscale(img)
