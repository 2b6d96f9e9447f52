"""Synthetic sensor-network data: random coordinates and smooth signals."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .graph import Graph, build_knn_graph, cycle_laplacian, eigendecompose, laplacian

# default box: 0..30 N, 110..170 E
LAT_RANGE = (0.0, 30.0)
LON_RANGE = (110.0, 170.0)


def random_coordinates(n: int, rng, lat_range=LAT_RANGE, lon_range=LON_RANGE) -> np.ndarray:
    return np.column_stack([rng.uniform(*lat_range, n), rng.uniform(*lon_range, n)])


def smooth_signal(g: Graph, t: int, smoothness: int, rng) -> np.ndarray:
    """Real N x T signal spanned by the ``smoothness`` lowest joint eigenvectors.

    Joint eigenpairs of the graph and the directed cycle are ranked by the
    modulus of the Cartesian-product eigenvalue ``lam_T + lam_G``; the
    signal is the real part of a complex Gaussian combination of the lowest
    ones.
    """
    n = g.n_vertices
    if not 1 <= smoothness <= n * t:
        raise InvalidParameterError(f"smoothness must be in [1, {n * t}], got {smoothness}")
    dG = eigendecompose(laplacian(g), hermitian_hint=True)
    dT = eigendecompose(cycle_laplacian(t))
    lam = np.abs(dT.eigenvalues[:, None] + dG.eigenvalues[None, :]).ravel()
    picks = np.argsort(lam, kind="stable")[:smoothness]
    ti, ni = np.unravel_index(picks, (t, n))
    alpha = rng.standard_normal(smoothness) + 1j * rng.standard_normal(smoothness)
    X = (dG.basis[:, ni] * alpha) @ dT.basis[:, ti].T
    return np.ascontiguousarray(X.real)


def synthesize(n: int, t: int, smoothness: int, seed: int, k: int = 5):
    """Coordinates, k-NN graph and smooth signal, all from one seed."""
    if n < 2 or t < 2:
        raise InvalidParameterError("n and t must be >= 2")
    rng = np.random.default_rng(seed)
    coords = random_coordinates(n, rng)
    g = build_knn_graph(coords, min(k, n - 1))
    return coords, g, smooth_signal(g, t, smoothness, rng)
