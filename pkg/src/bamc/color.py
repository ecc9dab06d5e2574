"""sRGB <-> CIELAB conversion (D65) with per-channel normalization to [0, 1].

Images are plain numpy arrays. A "Lab image" here is a float64 array of shape
``(height, width, 3)`` whose channels are L/100, (a+128)/255 and (b+128)/255.
"""

import numpy as np

from .errors import InvalidInputError

# IEC 61966-2-1 linear sRGB -> XYZ, rows sum to the D65 white point.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
WHITE_D65 = _RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0
_LAB_OFFSET = np.array([0.0, 128.0, 128.0])
_LAB_SCALE = np.array([100.0, 255.0, 255.0])


def _srgb_to_linear(c):
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c):
    c = np.clip(c, 0.0, 1.0)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1 / 2.4) - 0.055)


def _f(t):
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)


def _f_inv(t):
    return np.where(t > _DELTA, t**3, 3 * _DELTA**2 * (t - 4.0 / 29.0))


def _check_rgb(image):
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise InvalidInputError(f"expected an (H, W, 3) RGB array, got shape {image.shape}")
    if image.shape[0] == 0 or image.shape[1] == 0:
        raise InvalidInputError("image has a zero dimension")
    return image


def rgb_to_lab_raw(image):
    """Convert an 8-bit sRGB array to unnormalized CIELAB (L in [0, 100])."""
    image = _check_rgb(image)
    rgb = _srgb_to_linear(image.astype(np.float64) / 255.0)
    xyz = rgb @ _RGB_TO_XYZ.T / WHITE_D65
    fx, fy, fz = (_f(xyz[..., k]) for k in range(3))
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def normalize_lab(lab_raw):
    """Map raw Lab onto [0, 1]^3 using fixed bounds L in [0,100], a,b in [-128,127]."""
    return np.clip((np.asarray(lab_raw) + _LAB_OFFSET) / _LAB_SCALE, 0.0, 1.0)


def denormalize_lab(lab):
    return np.asarray(lab, dtype=np.float64) * _LAB_SCALE - _LAB_OFFSET


def rgb_to_lab(image):
    """Convert an 8-bit RGB image to a normalized Lab image.

    Parameters
    ----------
    image : array_like, shape (H, W, 3), uint8
        sRGB pixels.

    Returns
    -------
    ndarray, shape (H, W, 3), float64
        CIELAB under D65, each channel affinely mapped to [0, 1].
    """
    return normalize_lab(rgb_to_lab_raw(image))


def lab_to_rgb(lab):
    """Inverse of :func:`rgb_to_lab`; returns uint8 sRGB, out-of-gamut values clipped."""
    lab = np.asarray(lab, dtype=np.float64)
    L, a, b = np.moveaxis(denormalize_lab(lab), -1, 0)
    fy = (L + 16.0) / 116.0
    xyz = np.stack([_f_inv(fy + a / 500.0), _f_inv(fy), _f_inv(fy - b / 200.0)], axis=-1)
    rgb = _linear_to_srgb((xyz * WHITE_D65) @ _XYZ_TO_RGB.T)
    return np.round(rgb * 255.0).astype(np.uint8)
