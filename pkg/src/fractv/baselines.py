"""First-stage denoisers: joint Tikhonov smoothing and the recursive graph median."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .graph import Graph, SpectralDecomposition

log = logging.getLogger(__name__)

IMAG_WARN = 1e-8


@dataclass(frozen=True)
class TikhonovConfig:
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma >= 0:
            raise InvalidParameterError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class MedianConfig:
    iterations: int = 2
    include_temporal_neighbors: bool = True

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise InvalidParameterError(f"iterations must be >= 1, got {self.iterations}")


def tikhonov_denoise(y, temporal: SpectralDecomposition, graph: SpectralDecomposition,
                     cfg: TikhonovConfig = TikhonovConfig()) -> np.ndarray:
    """Solve ``(I + gamma L_J) z = y`` with ``L_J = L_T kron I + I kron L_G``.

    ``y`` is either the length-NT vectorization or the N x T matrix; the
    result has the same layout. Each joint frequency is scaled by
    ``1 / (1 + gamma (lam_T + lam_G))`` and the real part is returned.
    """
    if isinstance(cfg, (int, float)):
        cfg = TikhonovConfig(float(cfg))
    n, t = graph.size, temporal.size
    y = np.asarray(y, dtype=np.float64)
    vector = y.ndim == 1
    if vector and y.shape != (n * t,):
        raise InvalidParameterError(f"expected a vector of length {n * t}, got {y.shape}")
    if not vector and y.shape != (n, t):
        raise InvalidParameterError(f"expected an {n}x{t} signal, got {y.shape}")
    Y = y.reshape((n, t), order="F") if vector else y
    if cfg.gamma == 0:
        return y.copy()

    U_G, U_T = graph.basis, temporal.basis
    S = U_G.conj().T @ Y @ U_T.conj()
    gain = 1.0 / (1.0 + cfg.gamma * (graph.eigenvalues[:, None] + temporal.eigenvalues[None, :]))
    Z = U_G @ (S * gain) @ U_T.T
    if np.iscomplexobj(Z):
        resid = np.abs(Z.imag).max()
        if resid > IMAG_WARN * max(1.0, np.abs(Z.real).max()):
            log.warning("Tikhonov synthesis left an imaginary residue of %.3g", resid)
        Z = Z.real
    return Z.reshape(-1, order="F") if vector else Z


def recursive_median_filter(Y, g: Graph, cfg: MedianConfig = MedianConfig()) -> np.ndarray:
    """Repeated graph median smoothing of an N x T signal.

    Every pass replaces entry (v, t) by the median over v, its graph
    neighbors at time t and, optionally, v at times t-1 and t+1 (indices
    clamped at the block edges). Each pass reads the previous pass' output.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] != g.n_vertices:
        raise InvalidParameterError(f"expected an {g.n_vertices} x T signal, got {Y.shape}")
    indptr, indices = g.csr()
    out = np.ascontiguousarray(Y)
    for _ in range(int(cfg.iterations)):
        out = kernels.median_pass(out, indptr, indices, bool(cfg.include_temporal_neighbors))
    return out
