"""Precision/recall and F-measure curves for saliency maps against binary masks."""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imageio
from .errors import InvalidInputError, NoMatchesError

BETA_SQ = 0.3
THRESHOLDS = np.arange(256)


@dataclass(frozen=True, eq=False)
class EvalCurve:
    """Precision, recall and F-measure at thresholds 0..255."""

    precision: np.ndarray
    recall: np.ndarray
    f_measure: np.ndarray

    @property
    def thresholds(self):
        return THRESHOLDS

    @property
    def max_f(self):
        return float(self.f_measure.max())

    @property
    def mean_f(self):
        return float(self.f_measure.mean())

    @property
    def threshold_at_max_f(self):
        return int(np.argmax(self.f_measure))

    @property
    def points(self):
        return [
            {"threshold": int(t), "precision": float(p), "recall": float(r), "f_measure": float(f)}
            for t, p, r, f in zip(THRESHOLDS, self.precision, self.recall, self.f_measure)
        ]

    def summary(self):
        return {
            "max_f": self.max_f,
            "mean_f": self.mean_f,
            "threshold_at_max_f": self.threshold_at_max_f,
        }


def _as_map(saliency):
    saliency = np.asarray(saliency)
    if saliency.dtype == np.uint8:
        return saliency
    if np.issubdtype(saliency.dtype, np.integer):
        if saliency.min(initial=0) < 0 or saliency.max(initial=0) > 255:
            raise InvalidInputError("integer saliency map must lie in 0..255")
        return saliency.astype(np.uint8)
    return imageio.to_uint8(saliency)


def as_binary_mask(gt):
    """Validate a ground-truth mask; accepts {0, 1}, {0, 255} or bool."""
    gt = np.asarray(gt)
    if gt.dtype == bool:
        return gt
    values = np.unique(gt)
    if np.all(np.isin(values, (0, 1))):
        return gt == 1
    if np.all(np.isin(values, (0, 255))):
        return gt == 255
    raise InvalidInputError(f"ground truth is not binary (values include {values[:6].tolist()})")


def _check_pair(saliency, gt):
    saliency = _as_map(saliency)
    gt = as_binary_mask(gt)
    if saliency.shape != gt.shape:
        raise InvalidInputError(f"map shape {saliency.shape} != mask shape {gt.shape}")
    return saliency, gt


def confusion(saliency, gt, t):
    """(TP, FP, FN) when pixels with 8-bit value >= t are predicted salient."""
    saliency, gt = _check_pair(saliency, gt)
    pred = saliency >= t
    tp = int(np.count_nonzero(pred & gt))
    fp = int(np.count_nonzero(pred & ~gt))
    fn = int(np.count_nonzero(~pred & gt))
    return tp, fp, fn


def confusion_curve(saliency, gt):
    """TP, FP, FN arrays over all 256 thresholds, from value histograms."""
    saliency, gt = _check_pair(saliency, gt)
    pos = np.bincount(saliency[gt], minlength=256)
    neg = np.bincount(saliency[~gt], minlength=256)
    tp = np.cumsum(pos[::-1])[::-1]
    fp = np.cumsum(neg[::-1])[::-1]
    fn = int(pos.sum()) - tp
    return tp, fp, fn


def precision_recall(tp, fp, fn):
    """Precision and recall; 0/0 counts as 1 for both."""
    tp, fp, fn = (np.asarray(v, dtype=np.float64) for v in (tp, fp, fn))
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 1.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 1.0)
    if precision.ndim == 0:
        return float(precision), float(recall)
    return precision, recall


def f_measure(precision, recall, beta_sq=BETA_SQ):
    """Weighted harmonic mean of precision and recall; 0 when both vanish."""
    p = np.asarray(precision, dtype=np.float64)
    r = np.asarray(recall, dtype=np.float64)
    denom = beta_sq * p + r
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(denom > 0, (1 + beta_sq) * p * r / denom, 0.0)
    return float(f) if f.ndim == 0 else f


def evaluate_image(saliency, gt, beta_sq=BETA_SQ):
    p, r = precision_recall(*confusion_curve(saliency, gt))
    return EvalCurve(precision=p, recall=r, f_measure=f_measure(p, r, beta_sq))


def aggregate(curves, beta_sq=BETA_SQ):
    """Macro average: mean precision and recall per threshold, then F."""
    curves = list(curves)
    if not curves:
        raise InvalidInputError("no curves to aggregate")
    p = np.mean([c.precision for c in curves], axis=0)
    r = np.mean([c.recall for c in curves], axis=0)
    return EvalCurve(precision=p, recall=r, f_measure=f_measure(p, r, beta_sq))


@dataclass(eq=False)
class DatasetResult:
    aggregate: EvalCurve
    per_image: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @property
    def mean_image_max_f(self):
        return float(np.mean([c.max_f for c in self.per_image.values()]))

    def summary(self):
        out = self.aggregate.summary()
        out["mean_image_max_f"] = self.mean_image_max_f
        out["images"] = len(self.per_image)
        out["skipped"] = list(self.skipped)
        return out


def match_stems(map_dir, gt_dir):
    """Pair files by stem; return (pairs, skip report)."""
    maps = {p.stem: p for p in imageio.list_images(map_dir)}
    masks = {p.stem: p for p in imageio.list_images(gt_dir)}
    pairs = [(stem, maps[stem], masks[stem]) for stem in sorted(maps.keys() & masks.keys())]
    skipped = [f"{stem}: no ground truth" for stem in sorted(maps.keys() - masks.keys())]
    skipped += [f"{stem}: no saliency map" for stem in sorted(masks.keys() - maps.keys())]
    return pairs, skipped


def load_mask(path, binarize=False):
    gt = imageio.load_gray(path)
    return gt >= 128 if binarize else as_binary_mask(gt)


def evaluate_dataset(map_dir, gt_dir, beta_sq=BETA_SQ, binarize_gt=False):
    """Evaluate every map in ``map_dir`` against the same-stem mask in ``gt_dir``.

    Unmatched or unreadable files are recorded in ``skipped`` rather than
    aborting. Raises :class:`NoMatchesError` when nothing can be evaluated.
    """
    pairs, skipped = match_stems(map_dir, gt_dir)
    per_image = {}
    for stem, map_path, gt_path in pairs:
        try:
            sal = imageio.load_gray(map_path)
            gt = load_mask(gt_path, binarize_gt)
            per_image[stem] = evaluate_image(sal, gt, beta_sq)
        except Exception as exc:  # noqa: BLE001 - any per-file failure is reported, not fatal
            skipped.append(f"{stem}: {exc}")
    if not per_image:
        raise NoMatchesError(f"no matched map/mask pairs between {map_dir} and {gt_dir}")
    return DatasetResult(aggregate=aggregate(per_image.values(), beta_sq), per_image=per_image, skipped=skipped)


def curve_csv(curve):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "precision", "recall", "f_measure"])
    for t, p, r, f in zip(THRESHOLDS, curve.precision, curve.recall, curve.f_measure):
        writer.writerow([int(t), f"{p:.10f}", f"{r:.10f}", f"{f:.10f}"])
    return buf.getvalue()


def write_curve_csv(path, curve):
    Path(path).write_text(curve_csv(curve))


def read_curve_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    columns = {k: np.array([float(row[k]) for row in rows]) for k in ("precision", "recall", "f_measure")}
    return EvalCurve(**columns)


def write_summary_json(path, result):
    Path(path).write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
