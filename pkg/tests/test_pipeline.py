import json

import numpy as np
import pytest
from conftest import block_labels, random_blob_image, segmentation_from_colors
from scipy.io import mmread

from bamc import imageio
from bamc.color import rgb_to_lab
from bamc.errors import ConfigError
from bamc.optimize import SuperpixelSaliency
from bamc.pipeline import PipelineConfig, detect, detect_file, detect_scale, fuse_scales, paint, run


def test_default_config_values():
    c = PipelineConfig()
    assert c.sigma_sq == 0.1
    assert c.scales == (200, 250, 300)
    assert (c.sigma_b, c.sigma_s) == (1.0, 0.25)
    assert (c.compactness, c.slic_iters, c.mu, c.sigma_clr) == (20.0, 10, 0.1, 0.1)


@pytest.mark.parametrize(
    "bad", [{"sigma_sq": 0}, {"sigma_b": -1}, {"scales": []}, {"scales": [3]}, {"mu": -0.1}, {"bogus": 1}]
)
def test_invalid_config_rejected(bad):
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict(bad)


def test_config_json_round_trip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"scales": [120], "sigma_sq": 0.2}))
    c = PipelineConfig.from_json(path)
    assert c.scales == (120,) and c.sigma_sq == 0.2
    assert PipelineConfig.from_dict(c.to_dict()) == c
    assert c.replace(mu=None, sigma_s=0.3).sigma_s == 0.3


def test_square_is_salient_at_one_scale(square_image):
    img, mask = square_image
    res = detect_scale(rgb_to_lab(img), 100)
    assert not res.fallback
    pixel_s = paint(res.saliency, res.segmentation)
    assert pixel_s[mask].mean() > pixel_s[~mask].mean() + 0.5
    assert res.saliency.scale_tag == 100
    assert 0 <= res.saliency.s.min() and res.saliency.s.max() <= 1


def test_constant_image_takes_fallback():
    img = np.full((64, 80, 3), 128, dtype=np.uint8)
    res = detect_scale(rgb_to_lab(img), 40)
    assert res.fallback and res.zb is None
    np.testing.assert_array_equal(res.saliency.s, res.zf.values)
    m = detect(img, PipelineConfig(scales=(40, 60)))
    assert m.min() >= 0 and m.max() <= 1


def test_photo_sized_image_at_scale_200(rng):
    img = random_blob_image(rng, 300, 400)
    res = detect_scale(rgb_to_lab(img), 200)
    assert 160 <= res.segmentation.count <= 240


def test_fuse_identical_scales():
    seg = segmentation_from_colors(block_labels(3, 3), np.full((9, 3), 0.5))
    s = SuperpixelSaliency(s=np.linspace(0.2, 0.8, 9))
    single = fuse_scales([(s, seg)])
    triple = fuse_scales([(s, seg)] * 3)
    np.testing.assert_allclose(triple, single, atol=1e-15)
    np.testing.assert_allclose(single, (paint(s, seg) - 0.2) / 0.6)


def test_fuse_random_scales_matches_recomputation(rng):
    layers = []
    expected = np.zeros((12, 12))
    for rows in (2, 3, 4):
        labels = block_labels(rows, rows, block=12 // rows)
        seg = segmentation_from_colors(labels, rng.random((rows * rows, 3)))
        s = rng.random(rows * rows)
        layers.append((SuperpixelSaliency(s=s), seg))
        for r in range(12):
            for c in range(12):
                expected[r, c] += s[labels[r, c]]
    expected = (expected - expected.min()) / (expected.max() - expected.min())
    np.testing.assert_allclose(fuse_scales(layers, (12, 12)), expected, atol=1e-12)


def test_detect_is_deterministic_and_size_preserving(rng):
    img = random_blob_image(rng, 300, 400)
    a, b = detect(img), detect(img)
    assert a.shape == (300, 400)
    assert a.tobytes() == b.tobytes()
    assert a.min() == 0.0 and a.max() == 1.0


def test_run_keeps_one_result_per_scale(square_image):
    img, _ = square_image
    det = run(img, PipelineConfig(scales=(60, 90)))
    assert [r.saliency.scale_tag for r in det.scales] == [60, 90]


def test_detect_file_with_debug_dump(tmp_path, square_image):
    img, _ = square_image
    src = tmp_path / "in.png"
    imageio.save_rgb(src, img)
    dbg = tmp_path / "dbg"
    detect_file(src, tmp_path / "out.png", PipelineConfig(scales=(80,)), debug_dir=dbg)
    out = imageio.load_gray(tmp_path / "out.png")
    assert out.shape == img.shape[:2]
    summary = json.loads((dbg / "summary.json").read_text())
    assert [s["target"] for s in summary["scales"]] == [80]
    labels = imageio.load_labels(dbg / "scale_80_labels.png")
    assert labels.max() + 1 == summary["scales"][0]["superpixels"]
    p = mmread(str(dbg / "scale_80_boundary_P.mtx")).tocsr()
    np.testing.assert_allclose(np.asarray(p.sum(axis=1)).ravel(), 1.0, atol=1e-9)
    assert (dbg / "scale_80_prior_A.mtx").exists()
    header = (dbg / "scale_80_prior.csv").read_text().splitlines()[0]
    assert header == "superpixel,bc,f,selected"
