"""NumPy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the compiled version is checked against.
"""
import numpy as np

EARTH_RADIUS_KM = 6371.0


def haversine_matrix(lat, lon):
    """Pairwise great-circle distances (km) between points given in degrees."""
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    # differences in degrees first so equal spacings give equal distances
    dlat = np.radians(lat[None, :] - lat[:, None])
    dlon = np.radians(lon[None, :] - lon[:, None])
    phi = np.radians(lat)
    h = np.sin(dlat / 2.0) ** 2 + np.cos(phi)[:, None] * np.cos(phi)[None, :] * np.sin(dlon / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    np.fill_diagonal(d, 0.0)
    return d


def median_pass(Y, indptr, indices, temporal):
    """One pass of the graph median filter.

    Entry (v, t) becomes the median of Y[v, t], Y[u, t] for every neighbor u
    of v, and (if ``temporal``) Y[v, t-1], Y[v, t+1] with indices clamped to
    the block boundaries.
    """
    Y = np.asarray(Y, dtype=np.float64)
    n, t = Y.shape
    out = np.empty_like(Y)
    prev = np.maximum(np.arange(t) - 1, 0)
    nxt = np.minimum(np.arange(t) + 1, t - 1)
    for v in range(n):
        rows = [Y[v]]
        rows.extend(Y[u] for u in indices[indptr[v]:indptr[v + 1]])
        if temporal:
            rows.append(Y[v, prev])
            rows.append(Y[v, nxt])
        out[v] = np.median(np.vstack(rows), axis=0)
    return out
