import numpy as np
import pytest

from bamc.superpixel import extract_features


def block_labels(rows, cols, block=4):
    """Label map made of a rows x cols grid of square blocks."""
    grid = np.arange(rows * cols).reshape(rows, cols)
    return np.kron(grid, np.ones((block, block), dtype=np.int64)).astype(np.int64)


def segmentation_from_colors(labels, colors):
    """Segmentation whose superpixel k is painted uniformly with colors[k]."""
    colors = np.asarray(colors, dtype=np.float64)
    lab = colors[labels]
    return extract_features(labels, lab)


def random_blob_image(rng, h=120, w=160):
    """Smooth random RGB image with a few colored blobs."""
    img = np.empty((h, w, 3))
    img[:] = rng.uniform(40, 200, size=3)
    ys, xs = np.mgrid[0:h, 0:w]
    for _ in range(rng.integers(1, 5)):
        cy, cx = rng.uniform(0.2, 0.8) * h, rng.uniform(0.2, 0.8) * w
        r = rng.uniform(0.08, 0.25) * min(h, w)
        img[(ys - cy) ** 2 + (xs - cx) ** 2 < r**2] = rng.uniform(0, 255, size=3)
    img += rng.normal(0, 4, size=img.shape)
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def square_image():
    """Bright square on a dark background, with its mask."""
    img = np.full((120, 160, 3), 30, dtype=np.uint8)
    mask = np.zeros((120, 160), dtype=bool)
    mask[40:80, 55:105] = True
    img[mask] = (230, 210, 40)
    noise = np.random.default_rng(0).normal(0, 2, img.shape)
    return np.clip(img + noise, 0, 255).astype(np.uint8), mask


def random_absorbing_affinity(rng, n, m, density=0.3):
    """Dense affinity of a random absorbing chain: n transient then m absorbing nodes.

    Transient nodes form a connected symmetric graph (a random path plus extra
    edges); each absorber is linked from at least one transient node.
    """
    a = np.zeros((n + m, n + m))
    order = rng.permutation(n)
    for u, v in zip(order[:-1], order[1:]):
        a[u, v] = a[v, u] = rng.uniform(0.05, 1.0)
    extra = np.triu(rng.random((n, n)) < density, 1) * rng.uniform(0.05, 1.0, (n, n))
    a[:n, :n] = np.maximum(a[:n, :n], extra + extra.T)
    np.fill_diagonal(a, 1.0)
    for k in range(m):
        sources = rng.choice(n, size=int(rng.integers(1, max(2, n // 3))), replace=False)
        a[sources, n + k] = rng.uniform(0.05, 1.0, len(sources))
    return a


def transition_from_affinity(a):
    return a / a.sum(axis=1, keepdims=True)


# Outcome of each acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title} ({detail})")
