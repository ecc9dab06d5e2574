"""PR-curve and F-measure-curve figures rendered next to the CSV reports."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import THRESHOLDS  # noqa: E402

# Keep PNG bytes reproducible across runs and matplotlib versions.
_PNG_METADATA = {"Software": None}


def _new_axes():
    fig, ax = plt.subplots(figsize=(4.5, 3.6), dpi=100)
    ax.grid(True, linewidth=0.5, alpha=0.5)
    return fig, ax


def plot_pr_curve(curves, path, title="Precision-recall"):
    """Plot precision against recall for each named curve in ``curves``."""
    fig, ax = _new_axes()
    for name, curve in curves.items():
        ax.plot(curve.recall, curve.precision, label=name, linewidth=1.5)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("Recall")
    ax.set_ylabel("Precision")
    ax.set_title(title)
    if len(curves) > 1:
        ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)


def plot_f_curve(curves, path, title="F-measure"):
    """Plot F-measure against the binarization threshold."""
    fig, ax = _new_axes()
    for name, curve in curves.items():
        ax.plot(THRESHOLDS, curve.f_measure, label=name, linewidth=1.5)
    ax.set_xlim(0, 255)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("Threshold")
    ax.set_ylabel("F-measure")
    ax.set_title(title)
    if len(curves) > 1:
        ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)


def render_report(curve, csv_path, label="bamc"):
    """Write ``<stem>_pr.png`` and ``<stem>_f.png`` beside ``csv_path``."""
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    pr_path = stem.parent / f"{stem.name}_pr.png"
    f_path = stem.parent / f"{stem.name}_f.png"
    plot_pr_curve({label: curve}, pr_path)
    plot_f_curve({label: curve}, f_path)
    return pr_path, f_path
