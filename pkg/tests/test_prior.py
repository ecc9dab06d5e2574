import itertools
import math

import numpy as np
import pytest
from conftest import block_labels, segmentation_from_colors
from hypothesis import given
from hypothesis import strategies as st

from bamc.errors import DegeneratePriorError, InvalidInputError
from bamc.prior import (
    CONSTANT_PRIOR_TOL,
    SIGMA_B,
    SIGMA_S,
    boundary_connectivity,
    compute_prior,
    foreground_prior_scores,
    geodesic_distances,
    select_prior_nodes,
)
from bamc.superpixel import Segmentation


def all_simple_path_distance(seg, i, j):
    """Shortest path length by enumerating every simple path (tiny graphs only)."""
    if i == j:
        return 0.0
    x = seg.mean_lab
    best = math.inf

    def walk(node, seen, length):
        nonlocal best
        if node == j:
            best = min(best, length)
            return
        for nxt in seg.neighbors(node):
            if nxt not in seen:
                walk(nxt, seen | {nxt}, length + float(np.linalg.norm(x[node] - x[nxt])))

    walk(i, {i}, 0.0)
    return best


def direct_bc(seg, sigma_clr=0.1):
    n = seg.count
    bc = []
    for i in range(n):
        w = [math.exp(-all_simple_path_distance(seg, i, j) ** 2 / (2 * sigma_clr**2)) for j in range(n)]
        bc.append(sum(w[j] for j in range(n) if seg.is_boundary[j]) / math.sqrt(sum(w)))
    return np.array(bc)


def direct_prior(seg, bc, sigma_b=1.0, sigma_s=0.25):
    x, c = seg.mean_lab, seg.centroids
    f = []
    for i in range(seg.count):
        total = 0.0
        for j in range(seg.count):
            d_a = math.sqrt(sum((x[i, k] - x[j, k]) ** 2 for k in range(3)))
            d_s2 = (c[i, 0] - c[j, 0]) ** 2 + (c[i, 1] - c[j, 1]) ** 2
            total += (1 - math.exp(-bc[j] ** 2 / (2 * sigma_b**2))) * d_a * math.exp(-d_s2 / (2 * sigma_s**2))
        f.append(total)
    return np.array(f)


def test_default_constants():
    assert (SIGMA_B, SIGMA_S) == (1.0, 0.25)


def test_constant_image_bc():
    seg = segmentation_from_colors(block_labels(4, 5), np.full((20, 3), 0.4))
    bc = boundary_connectivity(seg)
    n_border = seg.is_boundary.sum()
    np.testing.assert_allclose(bc, n_border / np.sqrt(20), rtol=1e-12)


def test_isolated_interior_color_has_vanishing_bc():
    colors = np.full((25, 3), 0.4)
    colors[12] = (0.95, 0.1, 0.9)
    seg = segmentation_from_colors(block_labels(5, 5), colors)
    bc = boundary_connectivity(seg)
    assert bc[12] < 1e-3
    assert bc[0] > 1.0


def test_three_superpixel_bc_matches_hand_enumeration():
    labels = np.repeat(np.repeat(np.arange(3)[None, :], 4, axis=0), 4, axis=1)
    seg = segmentation_from_colors(labels, [[0.2, 0.5, 0.5], [0.25, 0.5, 0.5], [0.4, 0.6, 0.5]])
    # Path 0-1-2: d(0,1)=0.05, d(1,2)=sqrt(0.15^2+0.1^2), d(0,2) = sum of the two.
    d12 = math.hypot(0.15, 0.1)
    d = np.array([[0, 0.05, 0.05 + d12], [0.05, 0, d12], [0.05 + d12, d12, 0]])
    np.testing.assert_allclose(geodesic_distances(seg), d, atol=1e-12)
    w = np.exp(-(d**2) / (2 * 0.1**2))
    np.testing.assert_allclose(boundary_connectivity(seg), w.sum(1) / np.sqrt(w.sum(1)), rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_bc_matches_path_enumeration_on_grid(seed):
    rng = np.random.default_rng(seed)
    seg = segmentation_from_colors(block_labels(3, 3), rng.random((9, 3)))
    np.testing.assert_allclose(boundary_connectivity(seg), direct_bc(seg), rtol=1e-10)


def test_no_boundary_superpixels_rejected():
    seg = segmentation_from_colors(block_labels(2, 2), np.full((4, 3), 0.5))
    seg = Segmentation(
        labels=seg.labels,
        mean_lab=seg.mean_lab,
        centroids=seg.centroids,
        pixel_counts=seg.pixel_counts,
        is_boundary=np.zeros(4, dtype=bool),
        adjacency=seg.adjacency,
    )
    with pytest.raises(InvalidInputError):
        boundary_connectivity(seg)


def random_toy(rng):
    rows, cols = [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2)][rng.integers(5)]
    return segmentation_from_colors(block_labels(rows, cols, block=int(rng.integers(2, 6))), rng.random((rows * cols, 3)))


@pytest.mark.parametrize("seed", range(10))
def test_prior_matches_direct_summation(seed):
    rng = np.random.default_rng(seed)
    seg = random_toy(rng)
    bc = boundary_connectivity(seg)
    np.testing.assert_allclose(foreground_prior_scores(seg, bc), direct_prior(seg, bc), rtol=0, atol=1e-10)


def test_constant_image_has_zero_prior():
    seg = segmentation_from_colors(block_labels(3, 3), np.full((9, 3), 0.7))
    f = foreground_prior_scores(seg, boundary_connectivity(seg))
    np.testing.assert_array_equal(f, 0.0)
    with pytest.raises(DegeneratePriorError):
        compute_prior(seg)


def test_prior_is_permutation_equivariant(rng):
    labels = block_labels(3, 4)
    colors = rng.random((12, 3))
    seg = segmentation_from_colors(labels, colors)
    f = foreground_prior_scores(seg, boundary_connectivity(seg))
    perm = rng.permutation(12)
    inv = np.argsort(perm)
    seg2 = segmentation_from_colors(perm[labels], colors[inv])
    f2 = foreground_prior_scores(seg2, boundary_connectivity(seg2))
    np.testing.assert_allclose(f2[perm], f, rtol=1e-12)


def test_background_weighting_lowers_every_score(rng):
    seg = segmentation_from_colors(block_labels(3, 4), rng.random((12, 3)))
    bc = boundary_connectivity(seg)
    assert np.any(bc > 0)
    weighted = foreground_prior_scores(seg, bc)
    unweighted = foreground_prior_scores(seg, np.full(seg.count, np.inf))
    assert np.all(unweighted > weighted)


def test_select_examples():
    assert select_prior_nodes([0, 0, 0, 9]).tolist() == [3]
    assert select_prior_nodes([1, 2, 3, 4]).tolist() == [2, 3]
    with pytest.raises(DegeneratePriorError):
        select_prior_nodes([2.5, 2.5, 2.5])
    with pytest.raises(DegeneratePriorError):
        select_prior_nodes([0.3, 0.3 + 1e-16, 0.3])


@given(st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=40))
def test_selected_nodes_exceed_mean(values):
    f = np.array(values)
    try:
        selected = select_prior_nodes(f)
    except DegeneratePriorError:
        assert np.ptp(f) <= CONSTANT_PRIOR_TOL or np.all(f <= f.mean())
        return
    assert len(selected) > 0
    assert np.all(f[selected] > f.mean())
    rest = np.setdiff1d(np.arange(len(f)), selected)
    assert np.all(f[rest] <= f.mean())


def test_compute_prior_selects_distinct_center():
    colors = np.full((25, 3), 0.4)
    colors[12] = (0.9, 0.2, 0.8)
    prior = compute_prior(segmentation_from_colors(block_labels(5, 5), colors))
    assert 12 in prior.selected.tolist()
    assert prior.f[12] == prior.f.max()
