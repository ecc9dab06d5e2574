"""Deterministic synthetic image/mask corpora for end-to-end checks.

Each image is a flat noisy background with one or two flat-colored objects.
Colors are drawn in normalized Lab so that the contrast constraint is measured
in the same feature space the detector uses.
"""

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import imageio
from .color import lab_to_rgb, rgb_to_lab
from .errors import InvalidSpecError

KINDS = ("rectangle", "ellipse", "two-objects", "mixed")
MARGIN = 0.1
ADVERSARIAL_DISTANCE = (0.01, 0.04)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a synthetic corpus.

    ``object_scale`` bounds each object's extent as a fraction of the image
    width/height. ``mixed`` alternates rectangles and ellipses.
    """

    seed: int = 42
    count: int = 100
    dims: tuple = (400, 300)
    object_kind: str = "mixed"
    contrast: float = 0.25
    adversarial: bool = False
    noise: float = 3.0
    object_scale: tuple = (0.2, 0.45)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "object_scale", tuple(float(s) for s in self.object_scale))
        w, h = self.dims
        if w < 16 or h < 16:
            raise InvalidSpecError(f"image dims {self.dims} below 16x16")
        if self.count < 1:
            raise InvalidSpecError("count must be positive")
        if self.object_kind not in KINDS:
            raise InvalidSpecError(f"object_kind must be one of {KINDS}")
        lo, hi = self.object_scale
        if not 0 < lo <= hi:
            raise InvalidSpecError(f"bad object_scale {self.object_scale}")
        if hi > 1 - 2 * MARGIN:
            raise InvalidSpecError(
                f"object extent {hi:.2f} of the image does not fit inside the {MARGIN:.0%} border margin"
            )
        if not self.adversarial and not 0 < self.contrast <= 0.6:
            raise InvalidSpecError("contrast must be in (0, 0.6]")
        if self.noise < 0:
            raise InvalidSpecError("noise must be non-negative")

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["dims"] = list(self.dims)
        d["object_scale"] = list(self.object_scale)
        return d

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _realized_lab(lab):
    """Lab color after the round trip through 8-bit sRGB."""
    rgb = lab_to_rgb(np.asarray(lab, dtype=np.float64)[None, None, :])
    return rgb[0, 0], rgb_to_lab(rgb)[0, 0]


def _background_color(rng):
    lab = np.array([rng.uniform(0.25, 0.8), rng.uniform(0.4, 0.6), rng.uniform(0.4, 0.6)])
    return _realized_lab(lab)


def _object_color(rng, bg_lab, spec):
    if spec.adversarial:
        d = rng.uniform(*ADVERSARIAL_DISTANCE)
        direction = rng.normal(size=3)
        rgb, lab = _realized_lab(np.clip(bg_lab + d * direction / np.linalg.norm(direction), 0, 1))
        return rgb
    for _ in range(1000):
        lab = np.array([rng.uniform(0.05, 0.95), rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)])
        rgb, real = _realized_lab(lab)
        if np.linalg.norm(real - bg_lab) >= spec.contrast:
            return rgb
    raise InvalidSpecError(f"could not draw an object color with contrast {spec.contrast}")


def _box(rng, w, h, lo, hi):
    bw = rng.uniform(lo, hi) * w
    bh = rng.uniform(lo, hi) * h
    x0 = rng.uniform(MARGIN * w, (1 - MARGIN) * w - bw)
    y0 = rng.uniform(MARGIN * h, (1 - MARGIN) * h - bh)
    return x0, y0, bw, bh


def shape_mask(kind, box, w, h):
    """Rasterize a shape by testing pixel centers; returns (mask, analytic area)."""
    x0, y0, bw, bh = box
    ys, xs = np.mgrid[0:h, 0:w] + 0.5
    if kind == "rectangle":
        mask = (xs >= x0) & (xs < x0 + bw) & (ys >= y0) & (ys < y0 + bh)
        return mask, bw * bh
    cx, cy, a, b = x0 + bw / 2, y0 + bh / 2, bw / 2, bh / 2
    mask = ((xs - cx) / a) ** 2 + ((ys - cy) / b) ** 2 <= 1.0
    return mask, np.pi * a * b


def _shapes(rng, index, spec):
    w, h = spec.dims
    lo, hi = spec.object_scale
    kind = spec.object_kind
    if kind == "mixed":
        kind = ("rectangle", "ellipse")[index % 2]
    if kind != "two-objects":
        return [(kind, _box(rng, w, h, lo, hi))]
    # Two objects side by side in separate halves, so they never overlap.
    half = (w - 2 * MARGIN * w) / 2
    shapes = []
    for side in range(2):
        bw = rng.uniform(lo, hi) * half
        bh = rng.uniform(lo, hi) * h
        left = MARGIN * w + side * half
        x0 = rng.uniform(left, left + half - bw)
        y0 = rng.uniform(MARGIN * h, (1 - MARGIN) * h - bh)
        shapes.append((("rectangle", "ellipse")[rng.integers(2)], (x0, y0, bw, bh)))
    return shapes


def render(spec, index):
    """Return (rgb image, boolean mask, requested object area) for image ``index``."""
    rng = np.random.default_rng([spec.seed, index])
    w, h = spec.dims
    bg_rgb, bg_lab = _background_color(rng)
    image = np.empty((h, w, 3), dtype=np.float64)
    image[:] = bg_rgb
    mask = np.zeros((h, w), dtype=bool)
    area = 0.0
    for kind, box in _shapes(rng, index, spec):
        shape, shape_area = shape_mask(kind, box, w, h)
        image[shape] = _object_color(rng, bg_lab, spec)
        mask |= shape
        area += shape_area
    if spec.noise > 0:
        image += rng.normal(0.0, spec.noise, size=image.shape)
    return np.clip(np.round(image), 0, 255).astype(np.uint8), mask, area


def generate(spec, out_dir):
    """Write ``images/NNN.png``, ``masks/NNN.png`` and ``spec.json`` under ``out_dir``."""
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "masks").mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(spec.count - 1)))
    written = []
    for i in range(spec.count):
        image, mask, _ = render(spec, i)
        name = f"{i:0{width}d}.png"
        imageio.save_rgb(out_dir / "images" / name, image)
        imageio.save_gray(out_dir / "masks" / name, mask.astype(np.uint8) * 255)
        written.append(name)
    (out_dir / "spec.json").write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")
    return written
