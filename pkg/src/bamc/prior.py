"""Boundary connectivity and the contrast-based foreground prior."""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .errors import DegeneratePriorError, InvalidInputError

SIGMA_B = 1.0
SIGMA_S = 0.25
SIGMA_CLR = 0.1
CONSTANT_PRIOR_TOL = 1e-12

# Dijkstra drops explicit zero-cost edges, so identical neighbors get a tiny
# positive cost instead.
_MIN_EDGE_COST = 1e-12


@dataclass(frozen=True, eq=False)
class PriorScores:
    bc: np.ndarray
    f: np.ndarray
    selected: np.ndarray


def geodesic_distances(seg):
    """All-pairs shortest paths over superpixel adjacency, edge cost = Lab distance."""
    adj = sparse.triu(seg.adjacency, k=1).tocoo()
    x = seg.mean_lab
    cost = np.maximum(np.linalg.norm(x[adj.row] - x[adj.col], axis=1), _MIN_EDGE_COST)
    graph = sparse.csr_matrix((cost, (adj.row, adj.col)), shape=(seg.count, seg.count))
    return dijkstra(graph, directed=False)


def boundary_connectivity(seg, sigma_clr=SIGMA_CLR):
    """Boundary connectivity of each superpixel.

    ``BC_i = sum_{j in border} w_ij / sqrt(sum_j w_ij)`` with geodesic color
    similarity ``w_ij = exp(-d_geo(i, j)^2 / (2 sigma_clr^2))``.
    """
    border = seg.boundary_indices
    if len(border) == 0:
        raise InvalidInputError("segmentation has no boundary superpixels")
    d = geodesic_distances(seg)
    w = np.exp(-(d**2) / (2 * sigma_clr**2))
    return w[:, border].sum(axis=1) / np.sqrt(w.sum(axis=1))


def foreground_prior_scores(seg, bc, sigma_b=SIGMA_B, sigma_s=SIGMA_S):
    """Foreground prior ``f_i``: color contrast to likely-background regions, spatially weighted."""
    x = seg.mean_lab
    c = seg.centroids
    d_color = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    d_space_sq = np.sum((c[:, None, :] - c[None, :, :]) ** 2, axis=-1)
    background = 1.0 - np.exp(-np.asarray(bc) ** 2 / (2 * sigma_b**2))
    return (d_color * np.exp(-d_space_sq / (2 * sigma_s**2))) @ background


def select_prior_nodes(f):
    """Indices whose prior exceeds the mean prior.

    Raises :class:`DegeneratePriorError` when ``f`` is constant, where spreads
    below ``CONSTANT_PRIOR_TOL`` count as rounding noise.
    """
    f = np.asarray(f, dtype=np.float64)
    selected = np.flatnonzero(f > f.mean())
    if len(selected) == 0 or np.ptp(f) <= CONSTANT_PRIOR_TOL:
        raise DegeneratePriorError("foreground prior is constant; no prior nodes to absorb")
    return selected


def compute_prior(seg, sigma_b=SIGMA_B, sigma_s=SIGMA_S, sigma_clr=SIGMA_CLR):
    bc = boundary_connectivity(seg, sigma_clr)
    f = foreground_prior_scores(seg, bc, sigma_b, sigma_s)
    return PriorScores(bc=bc, f=f, selected=select_prior_nodes(f))
