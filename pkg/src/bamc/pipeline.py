"""End-to-end saliency detection: per-scale bidirectional chains, fusion, painting."""

import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import mmwrite

from . import chain, graph, imageio, optimize, prior, superpixel
from .color import rgb_to_lab
from .errors import ConfigError, DegeneratePriorError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    sigma_sq: float = graph.DEFAULT_SIGMA_SQ
    scales: tuple = (200, 250, 300)
    sigma_b: float = prior.SIGMA_B
    sigma_s: float = prior.SIGMA_S
    sigma_clr: float = prior.SIGMA_CLR
    compactness: float = superpixel.DEFAULT_COMPACTNESS
    slic_iters: int = superpixel.DEFAULT_ITERATIONS
    mu: float = optimize.DEFAULT_MU

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))
        for name in ("sigma_sq", "sigma_b", "sigma_s", "sigma_clr", "compactness"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.mu < 0:
            raise ConfigError("mu must be non-negative")
        if self.slic_iters < 1:
            raise ConfigError("slic_iters must be at least 1")
        if not self.scales or min(self.scales) < 4:
            raise ConfigError(f"scales must be nonempty and each >= 4, got {self.scales}")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def replace(self, **overrides):
        overrides = {k: v for k, v in overrides.items() if v is not None}
        try:
            return dataclasses.replace(self, **overrides)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["scales"] = list(self.scales)
        return d


@dataclass(eq=False)
class ScaleResult:
    """Everything computed at one superpixel scale."""

    saliency: optimize.SuperpixelSaliency
    segmentation: superpixel.Segmentation
    zf: chain.PossibilityVector
    zb: chain.PossibilityVector | None = None
    prior_scores: prior.PriorScores | None = None
    graphs: dict = field(default_factory=dict)
    fallback: bool = False


@dataclass(eq=False)
class Detection:
    saliency_map: np.ndarray
    scales: list


def detect_scale(lab, target_count, config=PipelineConfig()):
    """Run both absorbing chains at one scale and fuse them.

    If the foreground prior is constant the background chain cannot be built;
    the scale then falls back to the foreground possibility alone.
    """
    seg = superpixel.slic_segment(lab, target_count, config.compactness, config.slic_iters)
    edges = graph.transient_edges(seg)
    g1 = graph.build_graph(seg, seg.boundary_indices, config.sigma_sq, edges)
    zf = chain.possibility(g1, chain.FOREGROUND)

    bc = prior.boundary_connectivity(seg, config.sigma_clr)
    f = prior.foreground_prior_scores(seg, bc, config.sigma_b, config.sigma_s)
    try:
        selected = prior.select_prior_nodes(f)
    except DegeneratePriorError:
        log.info("scale %d: constant foreground prior, using foreground possibility only", target_count)
        return ScaleResult(
            saliency=optimize.SuperpixelSaliency(s=zf.values.copy(), scale_tag=target_count),
            segmentation=seg,
            zf=zf,
            prior_scores=prior.PriorScores(bc=bc, f=f, selected=np.array([], dtype=np.int64)),
            graphs={"boundary": g1},
            fallback=True,
        )
    g2 = graph.build_graph(seg, selected, config.sigma_sq, edges)
    zb = chain.possibility(g2, chain.BACKGROUND)

    weights = graph.edge_weights(seg, edges, config.sigma_sq) + config.mu
    sal = optimize.optimize(zb, zf, edges, weights, scale_tag=target_count)
    return ScaleResult(
        saliency=sal,
        segmentation=seg,
        zf=zf,
        zb=zb,
        prior_scores=prior.PriorScores(bc=bc, f=f, selected=selected),
        graphs={"boundary": g1, "prior": g2},
    )


def paint(saliency, seg):
    return np.asarray(getattr(saliency, "s", saliency))[seg.labels]


def fuse_scales(per_scale, shape=None):
    """Sum per-scale pixel maps and min-max normalize the total to [0, 1].

    ``per_scale`` holds ``(saliency, segmentation)`` pairs or ScaleResults.
    """
    total = None
    for item in per_scale:
        if isinstance(item, ScaleResult):
            item = (item.saliency, item.segmentation)
        sal, seg = item
        layer = paint(sal, seg)
        if shape is not None and layer.shape != tuple(shape):
            raise ValueError(f"scale map shape {layer.shape} != {tuple(shape)}")
        total = layer.astype(np.float64) if total is None else total + layer
    if total is None:
        raise ValueError("no scale results to fuse")
    lo, hi = total.min(), total.max()
    if hi - lo < 1e-12:
        return np.full_like(total, 0.5)
    return (total - lo) / (hi - lo)


def run(image, config=PipelineConfig()):
    """Full detection on an (H, W, 3) uint8 RGB array, keeping per-scale details."""
    lab = rgb_to_lab(image)
    results = [detect_scale(lab, n, config) for n in config.scales]
    return Detection(saliency_map=fuse_scales(results, lab.shape[:2]), scales=results)


def detect(image, config=PipelineConfig()):
    """Saliency map in [0, 1] with the same height and width as ``image``."""
    return run(image, config).saliency_map


def detect_file(src, dst, config=PipelineConfig(), debug_dir=None):
    image = imageio.load_rgb(src)
    detection = run(image, config)
    imageio.save_gray(dst, detection.saliency_map)
    if debug_dir is not None:
        dump_debug(detection, config, debug_dir)
    return detection


def dump_debug(detection, config, directory):
    """Write intermediate products of a detection for inspection.

    Per scale: the label map (16-bit PNG), affinity and transition matrices of
    each chain (Matrix Market), prior scores (CSV) and possibilities (CSV).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    summary = {"config": config.to_dict(), "scales": []}
    for res in detection.scales:
        tag = res.saliency.scale_tag
        stem = f"scale_{tag}"
        imageio.save_labels(directory / f"{stem}_labels.png", res.segmentation.labels)
        for name, g in res.graphs.items():
            mmwrite(str(directory / f"{stem}_{name}_A.mtx"), g.affinity)
            mmwrite(str(directory / f"{stem}_{name}_P.mtx"), g.transition)
        with open(directory / f"{stem}_prior.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["superpixel", "bc", "f", "selected"])
            chosen = set(res.prior_scores.selected.tolist())
            for i, (b, f) in enumerate(zip(res.prior_scores.bc, res.prior_scores.f)):
                writer.writerow([i, repr(float(b)), repr(float(f)), int(i in chosen)])
        with open(directory / f"{stem}_superpixels.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["superpixel", "zf", "zb", "s"])
            zb = res.zb.values if res.zb is not None else [None] * len(res.zf)
            for i, (a, b, s) in enumerate(zip(res.zf.values, zb, res.saliency.s)):
                writer.writerow([i, repr(float(a)), "" if b is None else repr(float(b)), repr(float(s))])
        summary["scales"].append(
            {
                "target": tag,
                "superpixels": res.segmentation.count,
                "boundary_absorbers": res.graphs["boundary"].m_absorbing,
                "prior_absorbers": res.graphs["prior"].m_absorbing if "prior" in res.graphs else 0,
                "fallback": res.fallback,
            }
        )
    (directory / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
