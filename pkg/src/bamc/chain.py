"""Absorbed times of an absorbing Markov chain and their normalization."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .errors import ChainNotAbsorbingError

RESIDUAL_TOL = 1e-8
FOREGROUND = "foreground"
BACKGROUND = "background"


@dataclass(frozen=True, eq=False)
class PossibilityVector:
    """Min-max normalized absorbed times over the transient nodes."""

    values: np.ndarray
    kind: str

    def __len__(self):
        return len(self.values)


def partition(graph):
    """Return the transient block Q (n x n) and transient-to-absorbing block R (n x m)."""
    n = graph.n_transient
    p = graph.transition
    return p[:n, :n].tocsr(), p[:n, n:].tocsr()


def absorbed_time(q):
    """Expected steps to absorption from each transient state.

    Solves ``(I - Q) z = 1`` with a sparse LU factorization instead of forming
    the fundamental matrix. Raises :class:`ChainNotAbsorbingError` if the system
    is singular or the residual exceeds ``RESIDUAL_TOL``.
    """
    q = sparse.csc_matrix(q, dtype=np.float64)
    n = q.shape[0]
    system = sparse.identity(n, format="csc") - q
    ones = np.ones(n)
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            z = np.atleast_1d(spsolve(system, ones))
        except (MatrixRankWarning, RuntimeError) as exc:
            raise ChainNotAbsorbingError(f"I - Q is singular: {exc}") from exc
    if not np.all(np.isfinite(z)):
        raise ChainNotAbsorbingError("absorbed time is not finite")
    residual = np.max(np.abs(system @ z - ones))
    if residual > RESIDUAL_TOL:
        raise ChainNotAbsorbingError(f"solve residual {residual:.3g} exceeds {RESIDUAL_TOL}")
    return z


def normalize(z, kind=FOREGROUND):
    z = np.asarray(z, dtype=np.float64)
    lo, hi = z.min(), z.max()
    if hi - lo < 1e-12:
        values = np.full_like(z, 0.5)
    else:
        values = (z - lo) / (hi - lo)
    return PossibilityVector(values=values, kind=kind)


def possibility(graph, kind):
    """Normalized absorbed time of ``graph``'s transient nodes."""
    q, _ = partition(graph)
    return normalize(absorbed_time(q), kind)
