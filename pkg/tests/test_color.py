import numpy as np
import pytest
from skimage.color import rgb2lab

from bamc.color import lab_to_rgb, rgb_to_lab, rgb_to_lab_raw
from bamc.errors import InvalidInputError


def px(rgb):
    return np.array(rgb, dtype=np.uint8).reshape(1, 1, 3)


def test_black_has_zero_lightness():
    assert rgb_to_lab(px((0, 0, 0)))[0, 0, 0] == pytest.approx(0.0, abs=1e-12)


def test_white_has_full_lightness():
    assert rgb_to_lab(px((255, 255, 255)))[0, 0, 0] == pytest.approx(1.0, abs=1e-6)


def test_mid_gray_is_neutral():
    lab = rgb_to_lab(px((119, 119, 119)))[0, 0]
    # Independent route: scikit-image's sRGB -> Lab (D65, 2 degree observer).
    ref = rgb2lab(px((119, 119, 119)) / 255.0)[0, 0]
    np.testing.assert_allclose((ref[1:] + 128) / 255, [128 / 255, 128 / 255], atol=1e-4)
    np.testing.assert_allclose(lab[1:], [128 / 255, 128 / 255], atol=1e-5)


def test_matches_reference_conversion(rng):
    img = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
    ours = rgb_to_lab_raw(img)
    ref = rgb2lab(img / 255.0)
    np.testing.assert_allclose(ours, ref, atol=5e-3)


def test_channels_in_unit_range(rng):
    img = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    corners = np.array([[[r, g, b] for r in (0, 255) for g in (0, 255) for b in (0, 255)]], dtype=np.uint8)
    for image in (img, corners):
        lab = rgb_to_lab(image)
        assert lab.shape == image.shape
        assert lab.min() >= 0.0 and lab.max() <= 1.0


def test_round_trip(rng):
    img = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
    back = lab_to_rgb(rgb_to_lab(img)).astype(int)
    assert np.abs(back - img).max() <= 1


@pytest.mark.parametrize("shape", [(0, 5, 3), (5, 0, 3), (5, 5), (5, 5, 4)])
def test_rejects_bad_shapes(shape):
    with pytest.raises(InvalidInputError):
        rgb_to_lab(np.zeros(shape, dtype=np.uint8))
