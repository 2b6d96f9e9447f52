"""Graphs, Laplacians and unitary eigendecompositions of normal shift operators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from . import kernels
from .errors import InvalidParameterError, UnsupportedOperatorError

NORMALITY_TOL = 1e-8
# relative tolerance used when ordering eigenvalues, so that roundoff does not
# decide between analytically equal real parts
_SORT_DECIMALS = 9


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph.

    The adjacency is stored symmetric with a zero diagonal; ``coordinates``
    holds (latitude, longitude) pairs in degrees when the graph was built
    from geographic points.
    """

    adjacency: np.ndarray
    coordinates: np.ndarray | None = None

    def __post_init__(self):
        A = np.asarray(self.adjacency, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise InvalidParameterError(f"adjacency must be a nonempty square matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InvalidParameterError("adjacency contains non-finite weights")
        if np.any(A < 0):
            raise InvalidParameterError("adjacency weights must be nonnegative")
        if np.any(np.diag(A) != 0):
            raise InvalidParameterError("adjacency must have a zero diagonal")
        if not np.array_equal(A, A.T):
            raise InvalidParameterError("adjacency must be exactly symmetric")
        object.__setattr__(self, "adjacency", _frozen(A))
        if self.coordinates is not None:
            C = np.asarray(self.coordinates, dtype=np.float64)
            if C.shape != (A.shape[0], 2):
                raise InvalidParameterError(f"coordinates must have shape ({A.shape[0]}, 2), got {C.shape}")
            object.__setattr__(self, "coordinates", _frozen(C))

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def csr(self):
        """Neighbor lists as (indptr, indices) int64 arrays."""
        rows, cols = np.nonzero(self.adjacency)
        indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), cols.astype(np.int64)

    def edges(self):
        """Undirected edges as a list of (src, dst, weight) with src < dst."""
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(a), int(b), float(self.adjacency[a, b])) for a, b in zip(i, j)]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Unitary eigendecomposition ``op = basis @ diag(eigenvalues) @ basis^H``."""

    basis: np.ndarray
    eigenvalues: np.ndarray
    operator: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "basis", _frozen(self.basis))
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        if self.operator is not None:
            object.__setattr__(self, "operator", _frozen(self.operator))

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.basis
        return (U * self.eigenvalues) @ U.conj().T


@dataclass(frozen=True)
class CycleShift:
    """Directed cyclic shift of order T, entry (t, t+1 mod T) = 1."""

    order: int

    def __post_init__(self):
        if int(self.order) < 1:
            raise InvalidParameterError(f"cycle order must be >= 1, got {self.order}")

    @property
    def adjacency(self) -> np.ndarray:
        return np.roll(np.eye(self.order), 1, axis=1)


def build_knn_graph(coords, k: int = 5, metric: str = "haversine", weighting: str = "gaussian") -> Graph:
    """k-nearest-neighbor graph over (lat, lon) points.

    Each vertex selects its ``k`` nearest other vertices (ties to the lower
    index); an edge exists if either endpoint selected the other. With
    ``weighting="gaussian"`` the weight is ``exp(-d**2 / sigma**2)`` where
    sigma is the mean of all selected distances; ``"binary"`` uses 1.
    """
    C = np.asarray(coords, dtype=np.float64)
    if C.ndim != 2 or C.shape[1] != 2:
        raise InvalidParameterError(f"coords must be an (N, 2) array of (lat, lon), got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidParameterError("coordinates must be finite")
    n = C.shape[0]
    k = int(k)
    if k < 1 or k >= n:
        raise InvalidParameterError(f"k must satisfy 1 <= k < number of points ({n}), got {k}")

    if metric == "haversine":
        D = kernels.haversine_matrix(C[:, 0], C[:, 1])
    elif metric == "euclidean":
        D = cdist(C, C)
    else:
        raise InvalidParameterError(f"unknown metric {metric!r}")

    D_self = D.copy()
    np.fill_diagonal(D_self, np.inf)
    # stable sort keeps the lower index first among equal distances
    nearest = np.argsort(D_self, axis=1, kind="stable")[:, :k]
    selected = np.take_along_axis(D, nearest, axis=1)

    mask = np.zeros((n, n), dtype=bool)
    mask[np.repeat(np.arange(n), k), nearest.ravel()] = True
    mask |= mask.T

    if weighting == "gaussian":
        sigma = selected.mean()
        W = np.exp(-(D ** 2) / sigma ** 2) if sigma > 0 else np.ones_like(D)
    elif weighting == "binary":
        W = np.ones_like(D)
    else:
        raise InvalidParameterError(f"unknown weighting {weighting!r}")
    A = np.where(mask, W, 0.0)
    # exact symmetry regardless of how the kernel rounded D[i, j] vs D[j, i]
    A = np.triu(A, 1)
    A = A + A.T
    return Graph(A, coordinates=C)


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``D - A``."""
    A = g.adjacency
    return np.diag(A.sum(axis=1)) - A


def cycle_laplacian(T: int) -> np.ndarray:
    """``I - A_T`` for the directed cycle of length T (circulant, not symmetric)."""
    if int(T) < 1:
        raise InvalidParameterError(f"T must be >= 1, got {T}")
    return np.eye(T) - CycleShift(int(T)).adjacency


def _is_circulant(op) -> bool:
    n = op.shape[0]
    first = op[0]
    return all(np.array_equal(op[i], np.roll(first, i)) for i in range(1, n))


def _order_and_fix(vals, vecs):
    key_re = np.round(vals.real, _SORT_DECIMALS)
    key_im = np.round(vals.imag, _SORT_DECIMALS)
    order = np.lexsort((key_im, key_re))
    vals = vals[order]
    vecs = vecs[:, order]
    # phase convention: first nonzero entry of each column real-positive
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        tol = 1e-10 * np.abs(col).max()
        i0 = np.flatnonzero(np.abs(col) > tol)[0]
        phase = col[i0] / abs(col[i0])
        vecs[:, j] = col / phase
    return vals, vecs


def eigendecompose(op, hermitian_hint: bool = False) -> SpectralDecomposition:
    """Unitary eigendecomposition of a normal matrix.

    Hermitian input goes to ``eigh``; circulant input uses the unitary DFT
    basis analytically; any other normal matrix goes through a complex Schur
    factorization, whose triangular factor is diagonal for normal input.
    Eigenvalues are sorted ascending by real part, then imaginary part.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] == 0:
        raise InvalidParameterError(f"operator must be a nonempty square matrix, got shape {op.shape}")
    n = op.shape[0]
    hermitian = hermitian_hint or np.array_equal(op, op.conj().T)
    if hermitian:
        vals, vecs = np.linalg.eigh(op)
        vals, vecs = _order_and_fix(np.asarray(vals), vecs)
        vals = vals.real
        return SpectralDecomposition(vecs, vals, op)

    opH = op.conj().T
    if np.abs(op @ opH - opH @ op).max() > NORMALITY_TOL:
        raise UnsupportedOperatorError("operator is not normal; no unitary eigenbasis exists")

    if _is_circulant(op):
        idx = np.arange(n)
        vecs = np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)
        vals = np.fft.fft(op[0])
    else:
        Tri, Z = scipy.linalg.schur(op.astype(np.complex128), output="complex")
        vals, vecs = np.diag(Tri).copy(), Z
    vals, vecs = _order_and_fix(vals, vecs)
    return SpectralDecomposition(vecs, vals, op)
