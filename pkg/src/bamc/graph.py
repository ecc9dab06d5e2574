"""Absorbing-chain graphs over a superpixel segmentation.

Node order is positional: transient nodes (one per superpixel) come first,
followed by one absorbing duplicate per member of the absorbing set.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import ChainNotAbsorbingError, InvalidInputError

DEFAULT_SIGMA_SQ = 0.1


def edge_weight(x_i, x_j, sigma_sq=DEFAULT_SIGMA_SQ):
    """Color affinity ``exp(-||x_i - x_j|| / sigma_sq)``.

    The Euclidean norm is used unsquared. Broadcasts over leading axes, so
    arrays of Lab triples give an array of weights.
    """
    if sigma_sq <= 0:
        raise InvalidInputError("sigma_sq must be positive")
    diff = np.asarray(x_i, dtype=np.float64) - np.asarray(x_j, dtype=np.float64)
    return np.exp(-np.linalg.norm(diff, axis=-1) / sigma_sq)


def transient_edges(seg):
    """Undirected edges between superpixels, as an (E, 2) array with i < j.

    Two superpixels are joined when they are adjacent, share a neighbor, or
    both touch the image border.
    """
    adj = seg.adjacency.astype(np.int32)
    two_hop = adj @ adj
    b = seg.is_boundary.astype(np.int32)
    ring = sparse.csr_matrix(np.outer(b, b))
    linked = ((adj + two_hop + ring) > 0).tocoo()
    keep = linked.row < linked.col
    edges = np.stack([linked.row[keep], linked.col[keep]], axis=1).astype(np.int64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return edges[order]


def edge_weights(seg, edges, sigma_sq=DEFAULT_SIGMA_SQ):
    return edge_weight(seg.mean_lab[edges[:, 0]], seg.mean_lab[edges[:, 1]], sigma_sq)


@dataclass(frozen=True, eq=False)
class AbsorbingGraph:
    """Affinity, degree and transition matrices of an absorbing chain.

    ``degree`` holds the diagonal of D as a vector. ``absorb_origin[k]`` is the
    transient node duplicated by absorbing node ``n_transient + k``.
    """

    n_transient: int
    m_absorbing: int
    affinity: sparse.csr_matrix
    degree: np.ndarray
    transition: sparse.csr_matrix
    absorb_origin: np.ndarray

    @property
    def n_nodes(self):
        return self.n_transient + self.m_absorbing


def _check_reachability(n, transition):
    """Every transient component must touch at least one absorbing node."""
    q = transition[:n, :n]
    r = transition[:n, n:]
    n_comp, comp = connected_components(q, directed=False)
    exits = np.asarray(r.sum(axis=1)).ravel() > 0
    absorbed = np.zeros(n_comp, dtype=bool)
    absorbed[comp[exits]] = True
    if not absorbed.all():
        stranded = np.flatnonzero(~absorbed[comp])
        raise ChainNotAbsorbingError(
            f"{len(stranded)} transient node(s) cannot reach an absorbing node, e.g. {stranded[:5].tolist()}"
        )


def build_graph(seg, absorb_set, sigma_sq=DEFAULT_SIGMA_SQ, edges=None):
    """Build the absorbing graph whose absorbers duplicate ``absorb_set``.

    Each absorbing duplicate of superpixel k is linked (one way, into the
    absorber) from k itself with weight 1 and from every transient neighbor j
    of k with weight ``edge_weight(x_k, x_j)``. Absorbing rows hold only their
    unit self-loop.

    Parameters
    ----------
    seg : Segmentation
    absorb_set : iterable of int
        Superpixel indices to duplicate as absorbing nodes.
    sigma_sq : float
    edges : ndarray, optional
        Precomputed :func:`transient_edges` of ``seg``.
    """
    n = seg.count
    origin = np.unique(np.fromiter(absorb_set, dtype=np.int64))
    if len(origin) == 0:
        raise InvalidInputError("absorb_set is empty")
    if origin[0] < 0 or origin[-1] >= n:
        raise InvalidInputError("absorb_set contains indices outside the segmentation")
    m = len(origin)
    if edges is None:
        edges = transient_edges(seg)
    x = seg.mean_lab

    w = edge_weight(x[edges[:, 0]], x[edges[:, 1]], sigma_sq)
    rows = [edges[:, 0], edges[:, 1], np.arange(n + m)]
    cols = [edges[:, 1], edges[:, 0], np.arange(n + m)]
    vals = [w, w, np.ones(n + m)]

    # Transient -> absorbing links: origin itself plus origin's neighbors.
    slot = np.full(n, -1)
    slot[origin] = np.arange(m)
    for a, b in ((edges[:, 0], edges[:, 1]), (edges[:, 1], edges[:, 0])):
        hit = slot[a] >= 0
        k, j = a[hit], b[hit]
        rows.append(j)
        cols.append(n + slot[k])
        vals.append(edge_weight(x[k], x[j], sigma_sq))
    rows.append(origin)
    cols.append(n + np.arange(m))
    vals.append(np.ones(m))

    affinity = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n + m, n + m)
    ).tocsr()
    affinity.sum_duplicates()
    affinity.sort_indices()
    degree = np.asarray(affinity.sum(axis=1)).ravel()
    transition = (sparse.diags(1.0 / degree) @ affinity).tocsr()
    transition.sort_indices()
    _check_reachability(n, transition)
    return AbsorbingGraph(
        n_transient=n,
        m_absorbing=m,
        affinity=affinity,
        degree=degree,
        transition=transition,
        absorb_origin=origin,
    )
