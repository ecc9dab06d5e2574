"""Quadratic fusion of background and foreground possibilities."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .errors import InvalidInputError, OptimizerError

DEFAULT_MU = 0.1
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SuperpixelSaliency:
    s: np.ndarray
    scale_tag: int | None = None

    def __len__(self):
        return len(self.s)


def _values(z):
    return np.asarray(getattr(z, "values", z), dtype=np.float64)


def laplacian(n, edges, weights):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    i, j = edges[:, 0], edges[:, 1]
    w = sparse.coo_matrix(
        (np.concatenate([weights, weights]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n),
    ).tocsr()
    return sparse.diags(np.asarray(w.sum(axis=1)).ravel()) - w


def cost(s, zb, zf, edges, weights):
    """Fusion energy; each undirected edge contributes once."""
    s, zb, zf = np.asarray(s, dtype=np.float64), _values(zb), _values(zf)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    smooth = np.sum(weights * (s[edges[:, 0]] - s[edges[:, 1]]) ** 2)
    return np.sum(zb * s**2) + np.sum(zf * (s - 1.0) ** 2) + smooth


def gradient(s, zb, zf, edges, weights):
    zb, zf = _values(zb), _values(zf)
    system = sparse.diags(zb + zf) + laplacian(len(zb), edges, weights)
    return 2.0 * (system @ np.asarray(s, dtype=np.float64)) - 2.0 * zf


def optimize(zb, zf, edges, weights, scale_tag=None):
    """Minimize the fusion energy in closed form.

    Solves ``(diag(zb) + diag(zf) + L) s = zf`` where L is the Laplacian of the
    smoothness weights, then clamps to [0, 1].

    Parameters
    ----------
    zb, zf : PossibilityVector or array_like
        Background and foreground possibilities.
    edges : ndarray, shape (E, 2)
        Undirected smoothness edges.
    weights : ndarray, shape (E,)
        Smoothness weight per edge.
    """
    zb, zf = _values(zb), _values(zf)
    if zb.shape != zf.shape:
        raise InvalidInputError("zb and zf differ in length")
    weights = np.asarray(weights, dtype=np.float64)
    system = (sparse.diags(zb + zf) + laplacian(len(zb), edges, weights)).tocsc()
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            s = np.atleast_1d(spsolve(system, zf))
        except (MatrixRankWarning, RuntimeError) as exc:
            raise OptimizerError(f"fusion system is singular: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise OptimizerError("fusion solution is not finite")
    residual = np.max(np.abs(system @ s - zf), initial=0.0)
    if residual > RESIDUAL_TOL:
        raise OptimizerError(f"solve residual {residual:.3g} exceeds {RESIDUAL_TOL}")
    return SuperpixelSaliency(s=np.clip(s, 0.0, 1.0), scale_tag=scale_tag)
