"""Reading and writing image files (PNG and JPEG)."""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageDecodeError, InvalidInputError

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def list_images(directory):
    directory = Path(directory)
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def load_rgb(path):
    """Decode an image file to an (H, W, 3) uint8 array."""
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode image {path}: {exc}") from exc


def load_gray(path):
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8).copy()
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode image {path}: {exc}") from exc


def to_uint8(values):
    """Quantize a [0, 1] map to 8 bits by rounding."""
    values = np.asarray(values, dtype=np.float64)
    return np.round(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def save_gray(path, values):
    """Write a [0, 1] float map (or a uint8 array) as an 8-bit grayscale PNG."""
    values = np.asarray(values)
    if values.ndim != 2:
        raise InvalidInputError(f"expected a 2-D map, got shape {values.shape}")
    data = values if values.dtype == np.uint8 else to_uint8(values)
    Image.fromarray(data).save(path, format="PNG")


def save_rgb(path, image, compress_level=1):
    """Write an RGB image as PNG; noisy images barely compress, so default to the fast zlib level."""
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path, format="PNG", compress_level=compress_level)


def save_labels(path, labels):
    """Write a label map as a 16-bit PNG."""
    labels = np.asarray(labels)
    if labels.max(initial=0) > np.iinfo(np.uint16).max:
        raise InvalidInputError("too many labels for a 16-bit PNG")
    Image.fromarray(labels.astype(np.uint16)).save(path, format="PNG")


def load_labels(path):
    with Image.open(path) as im:
        return np.asarray(im, dtype=np.int64)
