"""
Pixel I/O and resampling

Images travel through the library as ``uint8`` numpy arrays of shape
``(height, width, 3)``. Pillow does decoding, PNG encoding and bilinear
resampling.
"""

import io
import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def as_rgb(pixels: np.ndarray) -> np.ndarray:
    """Coerce a grey, RGB or RGBA array to contiguous ``uint8`` RGB."""
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    elif arr.ndim == 3 and arr.shape[2] == 4:
        arr = arr[:, :, :3]
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an RGB image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    return np.ascontiguousarray(arr)


def load_image(path: PathLike) -> np.ndarray:
    with Image.open(path) as img:
        return as_rgb(np.asarray(img.convert("RGB")))


def decode_png(data: bytes) -> np.ndarray:
    """Decode PNG (or any Pillow-readable) bytes; raises ValueError on garbage."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            img.load()
            return as_rgb(np.asarray(img.convert("RGB")))
    except (UnidentifiedImageError, OSError) as exc:
        raise ValueError(f"not a decodable image: {exc}") from exc


def encode_png(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(as_rgb(pixels)).save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def save_png(pixels: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_png(pixels))
    logger.debug("wrote %s", path)
    return path


def resize(pixels: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinear resample to ``width x height``; a no-op when already that size."""
    arr = as_rgb(pixels)
    if arr.shape[1] == width and arr.shape[0] == height:
        return arr.copy()
    img = Image.fromarray(arr).resize((width, height), Image.Resampling.BILINEAR)
    return np.asarray(img, dtype=np.uint8).copy()
