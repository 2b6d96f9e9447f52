"""Optimal polynomial time-vertex filters and their Wiener-Hopf equations.

A joint filter is ``H = sum_{p,q} c[p,q] L_T**p kron L_G**q``. The
coefficients are stored as a Q x P grid ``C`` with ``C[q, p] = c[p, q]`` and
flattened column-wise, so coefficient (p, q) sits at index ``p*Q + q``. The
regression matrix columns, the Vandermonde columns and the coefficient
vector all share that ordering.

In the joint spectral domain ``y_F = V y`` (V diagonalizes both shifts) the
normal equations become

    R = Psi^H diag(|y_F|^2) Psi,    r = Psi^H diag(conj(y_F)) x_F,

with ``Psi = Psi_T kron Psi_G`` built from the shift eigenvalues.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, InvalidParameterError

log = logging.getLogger(__name__)

ILL_CONDITIONED = 1e12
DEFAULT_RIDGE_SCALE = 1e-8


@dataclass(frozen=True)
class FilterCoefficients:
    """Coefficient grid of a joint polynomial filter (Q rows, P columns)."""

    grid: np.ndarray
    ill_conditioned: bool = False
    condition: float | None = None
    ridge: float = 0.0

    def __post_init__(self):
        G = np.asarray(self.grid)
        if G.ndim != 2 or 0 in G.shape:
            raise InvalidParameterError(f"coefficient grid must be a nonempty Q x P matrix, got {G.shape}")
        object.__setattr__(self, "grid", G)

    @classmethod
    def from_vector(cls, c, P: int, Q: int, **kw) -> "FilterCoefficients":
        c = np.asarray(c)
        if c.shape != (P * Q,):
            raise InvalidParameterError(f"expected {P * Q} coefficients, got shape {c.shape}")
        return cls(c.reshape((Q, P), order="F"), **kw)

    @classmethod
    def identity(cls, P: int = 1, Q: int = 1) -> "FilterCoefficients":
        G = np.zeros((Q, P), dtype=np.complex128)
        G[0, 0] = 1.0
        return cls(G)

    @property
    def P(self) -> int:
        return self.grid.shape[1]

    @property
    def Q(self) -> int:
        return self.grid.shape[0]

    @property
    def vector(self) -> np.ndarray:
        return self.grid.reshape(-1, order="F")

    def __getitem__(self, pq):
        p, q = pq
        return self.grid[q, p]


def build_vandermonde(frac_eigs, degree: int) -> np.ndarray:
    """D x K matrix whose column k holds the k-th powers of ``frac_eigs``."""
    if int(degree) < 1:
        raise InvalidParameterError(f"degree must be >= 1, got {degree}")
    return np.vander(np.asarray(frac_eigs), int(degree), increasing=True)


def _check_ops(y, L_T, L_G):
    L_T = np.asarray(L_T)
    L_G = np.asarray(L_G)
    t, n = L_T.shape[0], L_G.shape[0]
    if L_T.shape != (t, t) or L_G.shape != (n, n):
        raise InvalidParameterError("shift operators must be square")
    y = np.asarray(y)
    if y.shape != (n * t,):
        raise InvalidParameterError(f"signal must have length N*T = {n * t}, got shape {y.shape}")
    return y.reshape((n, t), order="F"), L_T, L_G


def build_regression_matrix(y, L_T, L_G, P: int, Q: int) -> np.ndarray:
    """NT x PQ matrix whose column ``p*Q + q`` is ``(L_T**p kron L_G**q) y``."""
    Y, L_T, L_G = _check_ops(y, L_T, L_G)
    if P < 1 or Q < 1:
        raise InvalidParameterError(f"P and Q must be >= 1, got P={P}, Q={Q}")
    n, t = Y.shape
    dtype = np.result_type(Y, L_T, L_G)
    B = np.empty((n * t, P * Q), dtype=dtype)
    graph_powers = [Y]
    for _ in range(1, Q):
        graph_powers.append(L_G @ graph_powers[-1])
    LtT = L_T.T
    for q, Gq in enumerate(graph_powers):
        Z = Gq
        for p in range(P):
            if p:
                Z = Z @ LtT
            B[:, p * Q + q] = Z.reshape(-1, order="F")
    return B


@dataclass
class WienerSystem:
    """Autocorrelation R, cross-correlation r and the spectral data behind them.

    ``y_spectrum``/``ref_spectrum`` have shape (K, NT) for K realizations;
    R and r are averages over realizations.
    """

    autocorrelation: np.ndarray
    cross_correlation: np.ndarray
    psi: np.ndarray
    y_spectrum: np.ndarray
    ref_spectrum: np.ndarray
    cross: str = "conj"
    _factor: tuple | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.autocorrelation.shape[0]

    def factor(self):
        """(A, b) with ``A^H A = R`` and ``A^H b = r``."""
        if self._factor is None:
            k = self.y_spectrum.shape[0]
            A = (self.y_spectrum[:, :, None] * self.psi[None, :, :]).reshape(-1, self.psi.shape[1])
            if self.cross == "conj":
                b = self.ref_spectrum.reshape(-1)
            else:
                b = (self.y_spectrum * self.ref_spectrum).reshape(-1)
            s = 1.0 / np.sqrt(k)
            self._factor = (A * s, b * s)
        return self._factor


def _as_realizations(v, length):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim == 1:
        v = v[None, :]
    if v.ndim != 2 or v.shape[1] != length:
        raise InvalidParameterError(f"spectra must have length {length}, got shape {v.shape}")
    return v


def assemble_wiener_system(y_F, x_F, psi=None, psi_factors=None, cross: str = "conj") -> WienerSystem:
    """Build the Wiener-Hopf system from joint spectra.

    Parameters
    ----------
    y_F, x_F : array, shape (NT,) or (K, NT)
        Noisy and reference spectra. With K rows, R and r are averaged over
        the realizations.
    psi : array, shape (NT, PQ), optional
        Joint Vandermonde matrix. Built from ``psi_factors`` when omitted.
    psi_factors : (Psi_T, Psi_G), optional
        Temporal (T x P) and graph (N x Q) Vandermonde factors. When given,
        R and r are accumulated one temporal frequency at a time instead of
        through the dense NT x PQ product.
    cross : {"conj", "squared"}
        ``"conj"`` weights ``x_F`` by ``conj(y_F)``; ``"squared"`` uses
        ``|y_F|**2`` instead.
    """
    if cross not in ("conj", "squared"):
        raise InvalidParameterError(f"cross must be 'conj' or 'squared', got {cross!r}")
    if psi is None:
        if psi_factors is None:
            raise InvalidParameterError("either psi or psi_factors is required")
        psi = np.kron(psi_factors[0], psi_factors[1])
    psi = np.asarray(psi)
    nt = psi.shape[0]
    Yf = _as_realizations(y_F, nt)
    Xf = _as_realizations(x_F, nt)
    if Yf.shape != Xf.shape:
        raise InvalidParameterError("y_F and x_F must have the same shape")
    k = Yf.shape[0]
    W = (np.abs(Yf) ** 2).mean(axis=0)
    weight = np.conj(Yf) if cross == "conj" else np.abs(Yf) ** 2
    z = (weight * Xf).mean(axis=0)

    if psi_factors is not None:
        psi_T, psi_G = (np.asarray(m) for m in psi_factors)
        t, P = psi_T.shape
        n, Q = psi_G.shape
        W_tn = W.reshape(t, n)
        graph_blocks = np.einsum("nq,tn,ns->tqs", psi_G.conj(), W_tn, psi_G, optimize=True)
        R = np.einsum("tp,tr,tqs->pqrs", psi_T.conj(), psi_T, graph_blocks, optimize=True).reshape(P * Q, P * Q)
        r = (psi_T.conj().T @ (z.reshape(t, n) @ psi_G.conj())).reshape(-1)
    else:
        R = (psi.conj().T * W) @ psi
        r = psi.conj().T @ z
    R = 0.5 * (R + R.conj().T)
    return WienerSystem(R, r, psi, Yf, Xf, cross)


def solve_coefficients(sys: WienerSystem, ridge: float | None = None, P: int | None = None,
                       Q: int | None = None, rcond: float = 1e-10) -> FilterCoefficients:
    """Solve ``(R + ridge I) c = r``.

    ``ridge=None`` picks ``1e-8 * trace(R) / PQ``. With ``ridge > 0`` the
    shifted system is positive definite and is solved by Cholesky. With
    ``ridge == 0`` the minimum-norm least-squares problem on the square-root
    factor of R is solved by SVD (singular values below ``rcond`` times the
    largest are dropped); the result is flagged when cond(R) exceeds 1e12.

    ``P`` and ``Q`` give the coefficient grid shape; without them a single
    temporal degree (P = 1) is assumed.
    """
    R, r = sys.autocorrelation, sys.cross_correlation
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(r))):
        raise InvalidInputError("Wiener-Hopf system contains NaN or Inf")
    m = R.shape[0]
    if P is None and Q is None:
        P, Q = 1, m
    elif P is None:
        P = m // Q
    elif Q is None:
        Q = m // P
    if P * Q != m:
        raise InvalidParameterError(f"P*Q = {P * Q} does not match system size {m}")

    if ridge is None:
        ridge = DEFAULT_RIDGE_SCALE * float(np.trace(R).real) / m
    ridge = float(ridge)
    if ridge < 0:
        raise InvalidParameterError(f"ridge must be nonnegative, got {ridge}")

    if ridge > 0:
        try:
            cf = scipy.linalg.cho_factor(R + ridge * np.eye(m), lower=True, check_finite=False)
            c = scipy.linalg.cho_solve(cf, r, check_finite=False)
            return FilterCoefficients.from_vector(c, P, Q, ridge=ridge)
        except np.linalg.LinAlgError:
            log.warning("Cholesky failed for ridge=%g; falling back to eigen-solve", ridge)
            w, V = np.linalg.eigh(R + ridge * np.eye(m))
            keep = w > rcond * w.max()
            c = V[:, keep] @ ((V[:, keep].conj().T @ r) / w[keep])
            return FilterCoefficients.from_vector(c, P, Q, ridge=ridge)

    if not np.any(R):
        return FilterCoefficients.from_vector(np.zeros(m, dtype=np.complex128), P, Q,
                                              ill_conditioned=True, condition=np.inf)
    A, b = sys.factor()
    c, _, rank, s = scipy.linalg.lstsq(A, b, cond=rcond, lapack_driver="gelsd", check_finite=False)
    s_full = np.zeros(m)
    s_full[: s.shape[0]] = s
    cond = np.inf if s_full.min() == 0 else float((s_full.max() / s_full.min()) ** 2)
    return FilterCoefficients.from_vector(c, P, Q, ill_conditioned=cond > ILL_CONDITIONED, condition=cond)


def apply_joint_filter(c: FilterCoefficients, L_T, L_G, y) -> np.ndarray:
    """``H y`` for ``H = sum c[p,q] L_T**p kron L_G**q`` without forming H.

    Nested Horner recursion in the matrix form ``L_G**q Y (L_T**p)^T``.
    """
    Y, L_T, L_G = _check_ops(y, L_T, L_G)
    C = c.grid
    LtT = L_T.T
    out = None
    for p in range(c.P - 1, -1, -1):
        inner = C[c.Q - 1, p] * Y
        for q in range(c.Q - 2, -1, -1):
            inner = L_G @ inner + C[q, p] * Y
        out = inner if out is None else out @ LtT + inner
    return out.reshape(-1, order="F")


def frequency_response(c: FilterCoefficients, frac_eigs_T, frac_eigs_G) -> np.ndarray:
    """Joint response ``Psi c`` at every (temporal, graph) eigenvalue pair."""
    psi_T = build_vandermonde(frac_eigs_T, c.P)
    psi_G = build_vandermonde(frac_eigs_G, c.Q)
    return (psi_G @ c.grid @ psi_T.T).reshape(-1, order="F")
