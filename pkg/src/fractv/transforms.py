"""Ordinary graph, temporal and joint time-vertex Fourier transforms.

Conventions used throughout the package:

* ``vec`` stacks columns, so a time-vertex signal X (N x T) becomes a
  length-NT vector made of T contiguous blocks of N vertex values.
* ``U_G`` and ``U_T`` are *synthesis* bases (eigenvectors as columns). The
  forward joint transform is the analysis operator ``(U_T kron U_G)^H``,
  which in matrix form reads ``U_G^H X conj(U_T)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


def vec(X) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(x, n: int, t: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (n * t,):
        raise InvalidParameterError(f"expected a vector of length {n * t}, got shape {x.shape}")
    return x.reshape((n, t), order="F")


@dataclass(frozen=True)
class TimeVertexSignal:
    """An N x T signal: row n is the time series at vertex n."""

    values: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.values)
        if X.ndim != 2 or 0 in X.shape:
            raise InvalidParameterError(f"signal must be a nonempty 2-D array, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InvalidParameterError("signal contains non-finite values")
        object.__setattr__(self, "values", X)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]

    def vector(self) -> np.ndarray:
        return vec(self.values)


@dataclass(frozen=True)
class JointSpectrum:
    """Length-NT joint spectrum together with the orders that produced it."""

    values: np.ndarray
    n: int
    t: int
    orders: tuple = (1.0, 1.0)

    def matrix(self) -> np.ndarray:
        return unvec(self.values, self.n, self.t)


def dft_matrix(T: int) -> np.ndarray:
    """Unitary DFT matrix, entry (j, k) = exp(-2 pi i jk / T) / sqrt(T)."""
    if int(T) < 1:
        raise InvalidParameterError(f"T must be >= 1, got {T}")
    idx = np.arange(T)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / T) / np.sqrt(T)


def _check_bases(n, t, U_G, U_T):
    U_G = np.asarray(U_G)
    U_T = np.asarray(U_T)
    if U_G.shape != (n, n):
        raise InvalidParameterError(f"U_G must be {n}x{n}, got {U_G.shape}")
    if U_T.shape != (t, t):
        raise InvalidParameterError(f"U_T must be {t}x{t}, got {U_T.shape}")
    return U_G, U_T


def gft(x, U_G) -> np.ndarray:
    """Graph Fourier transform ``U_G^H x`` (x may be N or N x T)."""
    return np.asarray(U_G).conj().T @ x


def igft(x_hat, U_G) -> np.ndarray:
    return np.asarray(U_G) @ x_hat


def jft(sig: TimeVertexSignal, U_G, U_T) -> JointSpectrum:
    """Joint time-vertex Fourier transform ``(U_T kron U_G)^H vec(X)``."""
    if not isinstance(sig, TimeVertexSignal):
        sig = TimeVertexSignal(sig)
    U_G, U_T = _check_bases(sig.n, sig.t, U_G, U_T)
    S = U_G.conj().T @ sig.values @ U_T.conj()
    return JointSpectrum(vec(S), sig.n, sig.t)


def ijft(spec: JointSpectrum, U_G, U_T, real: bool = False) -> TimeVertexSignal:
    """Inverse of :func:`jft`; ``real=True`` drops the imaginary part."""
    U_G, U_T = _check_bases(spec.n, spec.t, U_G, U_T)
    X = U_G @ spec.matrix() @ U_T.T
    return TimeVertexSignal(X.real if real else X)


def jft_matrix(U_G, U_T) -> np.ndarray:
    """Dense NT x NT analysis operator; for tests and small problems only."""
    return np.kron(np.asarray(U_T), np.asarray(U_G)).conj().T
