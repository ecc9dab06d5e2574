"""SLIC superpixels on normalized Lab images and per-superpixel features."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from scipy import sparse
from skimage.measure import label as connected_components

from .errors import InvalidInputError

DEFAULT_COMPACTNESS = 20.0
DEFAULT_ITERATIONS = 10

# Compactness is quoted on the classic Lab scale (L in 0..100); features here
# are normalized to [0, 1], so the spatial weight shrinks by the same factor.
_LAB_UNIT = 100.0


@dataclass(frozen=True)
class SuperpixelFeature:
    """Feature record of one superpixel."""

    mean_lab: np.ndarray
    centroid: np.ndarray
    pixel_count: int
    is_boundary: bool
    neighbors: frozenset


@dataclass(frozen=True, eq=False)
class Segmentation:
    """A label map plus per-superpixel features, stored column-wise.

    ``centroids`` hold (row, col) divided by the image diagonal. ``adjacency``
    is a symmetric boolean CSR matrix built from 4-connected pixel borders.
    """

    labels: np.ndarray
    mean_lab: np.ndarray
    centroids: np.ndarray
    pixel_counts: np.ndarray
    is_boundary: np.ndarray
    adjacency: sparse.csr_matrix

    @property
    def count(self):
        return len(self.pixel_counts)

    @property
    def shape(self):
        return self.labels.shape

    @cached_property
    def _neighbor_sets(self):
        adj = self.adjacency
        return tuple(
            frozenset(adj.indices[adj.indptr[i] : adj.indptr[i + 1]].tolist())
            for i in range(self.count)
        )

    def neighbors(self, i):
        return self._neighbor_sets[i]

    @property
    def boundary_indices(self):
        return np.flatnonzero(self.is_boundary)

    def feature(self, i):
        return SuperpixelFeature(
            mean_lab=self.mean_lab[i],
            centroid=self.centroids[i],
            pixel_count=int(self.pixel_counts[i]),
            is_boundary=bool(self.is_boundary[i]),
            neighbors=self.neighbors(i),
        )

    @property
    def features(self):
        return [self.feature(i) for i in range(self.count)]


def label_adjacency(labels, n=None):
    """Symmetric boolean adjacency of labels that share a 4-connected pixel border."""
    labels = np.asarray(labels)
    if n is None:
        n = int(labels.max()) + 1
    pairs = []
    for a, b in ((labels[:, :-1], labels[:, 1:]), (labels[:-1, :], labels[1:, :])):
        diff = a != b
        pairs.append(np.stack([a[diff], b[diff]], axis=1))
    pairs = np.concatenate(pairs)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    adj = sparse.coo_matrix((np.ones(len(rows), dtype=bool), (rows, cols)), shape=(n, n))
    adj = adj.tocsr()
    adj.sum_duplicates()
    adj.sort_indices()
    return adj


def extract_features(labels, lab):
    """Aggregate per-superpixel features from a label map.

    Labels must cover ``0 .. count-1`` with no gaps; an empty label means the
    segmentation is corrupt and raises ``RuntimeError``.
    """
    labels = np.asarray(labels)
    lab = np.asarray(lab, dtype=np.float64)
    if labels.shape != lab.shape[:2]:
        raise InvalidInputError("label map and Lab image differ in size")
    h, w = labels.shape
    flat = labels.ravel()
    n = int(flat.max()) + 1
    counts = np.bincount(flat, minlength=n)
    if np.any(counts == 0):
        raise RuntimeError(f"empty superpixel(s): {np.flatnonzero(counts == 0)[:5].tolist()}")

    colors = lab.reshape(-1, 3)
    mean_lab = np.stack(
        [np.bincount(flat, weights=colors[:, k], minlength=n) for k in range(3)], axis=1
    ) / counts[:, None]

    rows, cols = np.indices((h, w))
    diag = np.hypot(h, w)
    centroids = np.stack(
        [
            np.bincount(flat, weights=rows.ravel(), minlength=n),
            np.bincount(flat, weights=cols.ravel(), minlength=n),
        ],
        axis=1,
    ) / counts[:, None] / diag

    is_boundary = np.zeros(n, dtype=bool)
    for edge in (labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]):
        is_boundary[edge] = True

    return Segmentation(
        labels=labels,
        mean_lab=mean_lab,
        centroids=centroids,
        pixel_counts=counts,
        is_boundary=is_boundary,
        adjacency=label_adjacency(labels, n),
    )


def _grid_shape(h, w, target_count):
    step = np.sqrt(h * w / target_count)
    ny = int(min(h, max(1, round(h / step))))
    nx = int(min(w, max(1, round(w / step))))
    return ny, nx


def _lowest_gradient_seed(lab, r, c):
    h, w = lab.shape[:2]
    best, best_pos = np.inf, (r, c)
    for rr in range(max(r - 1, 1), min(r + 2, h - 1)):
        for cc in range(max(c - 1, 1), min(c + 2, w - 1)):
            g = np.sum((lab[rr + 1, cc] - lab[rr - 1, cc]) ** 2) + np.sum(
                (lab[rr, cc + 1] - lab[rr, cc - 1]) ** 2
            )
            if g < best:
                best, best_pos = g, (rr, cc)
    return best_pos


def _initial_centers(lab, ny, nx):
    h, w = lab.shape[:2]
    centers = []
    for i in range(ny):
        for j in range(nx):
            r = int((i + 0.5) * h / ny)
            c = int((j + 0.5) * w / nx)
            r, c = _lowest_gradient_seed(lab, r, c)
            centers.append([r, c, *lab[r, c]])
    return np.array(centers, dtype=np.float64)


def _grid_labels(h, w, ny, nx):
    rows = np.minimum((np.arange(h) * ny) // h, ny - 1)
    cols = np.minimum((np.arange(w) * nx) // w, nx - 1)
    return rows[:, None] * nx + cols[None, :]


@njit(cache=True)
def _assign(lab, centers, radius, spatial, labels, dist):
    h, w = labels.shape
    dist[:, :] = np.inf
    for k in range(centers.shape[0]):
        cr, cc = centers[k, 0], centers[k, 1]
        r0, r1 = max(int(cr) - radius, 0), min(int(cr) + radius + 1, h)
        c0, c1 = max(int(cc) - radius, 0), min(int(cc) + radius + 1, w)
        for r in range(r0, r1):
            dr = (r - cr) ** 2
            for c in range(c0, c1):
                d = spatial * (dr + (c - cc) ** 2)
                for ch in range(3):
                    d += (lab[r, c, ch] - centers[k, 2 + ch]) ** 2
                if d < dist[r, c]:
                    dist[r, c] = d
                    labels[r, c] = k


def _slic_cluster(lab, ny, nx, compactness, n_iter):
    h, w = lab.shape[:2]
    step = np.sqrt(h * w / (ny * nx))
    spatial = (compactness / _LAB_UNIT / step) ** 2
    centers = _initial_centers(lab, ny, nx)
    labels = _grid_labels(h, w, ny, nx)
    dist = np.empty((h, w))
    radius = int(np.ceil(step))
    n = len(centers)
    features = np.concatenate([np.indices((h, w)).reshape(2, -1).T, lab.reshape(-1, 3)], axis=1)

    for _ in range(n_iter):
        _assign(lab, centers, radius, spatial, labels, dist)
        flat = labels.ravel()
        counts = np.bincount(flat, minlength=n)
        alive = counts > 0
        sums = np.stack(
            [np.bincount(flat, weights=features[:, k], minlength=n) for k in range(5)], axis=1
        )
        centers[alive] = sums[alive] / counts[alive, None]
    return labels


def enforce_connectivity(labels):
    """Make every label 4-connected.

    Each label keeps its largest connected fragment; every other fragment is
    merged into the largest adjacent superpixel. Labels are then renumbered
    consecutively in raster order of first appearance.
    """
    labels = np.asarray(labels)
    comp = connected_components(labels + 1, background=0, connectivity=1) - 1
    n_comp = int(comp.max()) + 1
    comp_size = np.bincount(comp.ravel(), minlength=n_comp)
    comp_label = np.zeros(n_comp, dtype=np.int64)
    comp_label[comp.ravel()] = labels.ravel()

    # Largest fragment per original label (ties to lowest component id).
    order = np.lexsort((np.arange(n_comp), -comp_size, comp_label))
    keep = np.zeros(n_comp, dtype=bool)
    first = np.ones(n_comp, dtype=bool)
    first[1:] = comp_label[order[1:]] != comp_label[order[:-1]]
    keep[order[first]] = True

    owner = np.where(keep, np.arange(n_comp), -1)
    if not keep.all():
        adj = label_adjacency(comp, n_comp)
        owner_size = np.where(keep, comp_size, 0).astype(np.int64)
        pending = np.flatnonzero(~keep)
        # Smallest orphans first; an orphan whose neighbors are all orphans
        # waits until one of them has been assigned.
        pending = pending[np.argsort(comp_size[pending], kind="stable")]
        while len(pending):
            remaining = []
            for c in pending:
                nbrs = adj.indices[adj.indptr[c] : adj.indptr[c + 1]]
                owners = owner[nbrs]
                owners = owners[owners >= 0]
                if len(owners) == 0:
                    remaining.append(c)
                    continue
                target = owners[np.argmax(owner_size[owners])]
                owner[c] = target
                owner_size[target] += comp_size[c]
            if len(remaining) == len(pending):
                raise RuntimeError("orphan fragments are not adjacent to any superpixel")
            pending = np.array(remaining, dtype=np.int64)

    merged = owner[comp]
    _, first_idx, inverse = np.unique(merged.ravel(), return_index=True, return_inverse=True)
    rank = np.empty(len(first_idx), dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(len(first_idx))
    return rank[inverse].reshape(labels.shape)


def slic_segment(lab, target_count, compactness=DEFAULT_COMPACTNESS, n_iter=DEFAULT_ITERATIONS):
    """Segment a normalized Lab image into roughly ``target_count`` superpixels.

    Cluster centers start on a regular grid, move to the lowest-gradient pixel
    of their 3x3 neighborhood, and are refined for a fixed number of k-means
    iterations restricted to a 2S x 2S window. The result is deterministic.

    Parameters
    ----------
    lab : ndarray, shape (H, W, 3)
        Normalized Lab image from :func:`bamc.color.rgb_to_lab`.
    target_count : int
        Desired number of superpixels.
    compactness : float
        Spatial regularity, on the conventional Lab-unit scale.
    n_iter : int
        Number of assignment/update rounds.

    Returns
    -------
    Segmentation
    """
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 3 or lab.shape[2] != 3 or 0 in lab.shape[:2]:
        raise InvalidInputError(f"expected an (H, W, 3) Lab image, got shape {lab.shape}")
    h, w = lab.shape[:2]
    if target_count < 1 or target_count > h * w:
        raise InvalidInputError(f"target_count={target_count} not in [1, {h * w}]")
    if compactness <= 0:
        raise InvalidInputError("compactness must be positive")
    ny, nx = _grid_shape(h, w, target_count)
    labels = _slic_cluster(lab, ny, nx, compactness, n_iter)
    return extract_features(enforce_connectivity(labels), lab)
