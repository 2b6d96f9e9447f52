"""Fractional powers of Fourier matrices and of shift operators.

For a shift operator ``L = U diag(lam) U^H`` the order-``a`` fractional
Fourier matrix is ``F(a) = P diag(mu**a) P^H`` where ``U^H = P diag(mu) P^H``
(``U^H`` is unitary, so ``P`` is unitary too). All powers use the principal
logarithm, which keeps ``F(a) F(b) = F(a + b)`` exact up to roundoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError
from .graph import SpectralDecomposition, eigendecompose

_ZERO_TOL = 1e-12


def _check_order(a) -> float:
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise InvalidParameterError(f"fractional order must lie in [0, 1], got {a}")
    return a


def fractional_power(values, a: float) -> np.ndarray:
    """Principal-branch ``values**a`` with ``0**0 = 1`` and ``0**a = 0``.

    Entries whose modulus is below 1e-12 (relative to the largest, or
    absolute when that is below one) count as zero. Imaginary parts below
    the same threshold are cleared so that negative reals take the
    ``+i*pi`` branch.
    """
    v = np.asarray(values, dtype=np.complex128)
    scale = max(1.0, float(np.abs(v).max())) if v.size else 1.0
    tiny_im = np.abs(v.imag) <= _ZERO_TOL * scale
    v = np.where(tiny_im, v.real + 0j, v)
    zero = np.abs(v) <= _ZERO_TOL * scale
    if a == 0.0:
        return np.ones_like(v)
    out = np.empty_like(v)
    out[zero] = 0.0
    nz = ~zero
    out[nz] = np.exp(a * np.log(v[nz]))
    return out


@dataclass(frozen=True)
class FractionalBasis:
    """Fractional Fourier matrix of one order plus the powered shift spectrum."""

    order: float
    transform: np.ndarray
    frac_eigenvalues: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.transform.shape[0]


def fractional_transform(decomp: SpectralDecomposition, a: float, shift_eigenvalues=None) -> FractionalBasis:
    """Order-``a`` power of the unitary matrix described by ``decomp``.

    ``decomp`` decomposes the Fourier matrix ``U^H`` itself. When
    ``shift_eigenvalues`` (the spectrum of the shift whose eigenvectors form
    ``U``) is given, its principal ``a``-th powers are attached.
    """
    a = _check_order(a)
    n = decomp.size
    if a == 0.0:
        F = np.eye(n, dtype=np.complex128)
    elif a == 1.0 and decomp.operator is not None:
        F = np.asarray(decomp.operator, dtype=np.complex128)
    else:
        P = decomp.basis
        F = (P * fractional_power(decomp.eigenvalues, a)) @ P.conj().T
    lam = None if shift_eigenvalues is None else fractional_power(shift_eigenvalues, a)
    return FractionalBasis(a, F, lam)


class FractionalFamily:
    """All fractional orders of one shift operator.

    Decomposes ``U^H`` once and hands out bases and fractional shifts for
    any order in [0, 1]. Instances are read-only after construction and can
    be shared between workers.
    """

    def __init__(self, shift: SpectralDecomposition):
        self.shift = shift
        self.fourier = eigendecompose(np.ascontiguousarray(shift.basis.conj().T))

    @property
    def size(self) -> int:
        return self.shift.size

    def basis(self, a: float) -> FractionalBasis:
        return fractional_transform(self.fourier, a, self.shift.eigenvalues)

    def shift_operator(self, a: float, literal: bool = False) -> np.ndarray:
        return _gfso_from_basis(self.basis(a), literal)


def _gfso_from_basis(basis: FractionalBasis, literal: bool) -> np.ndarray:
    F = basis.transform
    lam = basis.frac_eigenvalues
    if literal:
        return (F * lam) @ F.conj().T
    return (F.conj().T * lam) @ F


def gfso(decomp: SpectralDecomposition, a: float, literal: bool = False) -> np.ndarray:
    """Graph fractional shift operator of order ``a``.

    The default orientation ``F(a)^H diag(lam**a) F(a)`` returns the shift
    itself at ``a = 1``. ``literal=True`` uses ``F(a) diag(lam**a) F(a)^H``,
    which at ``a = 1`` gives ``U^H diag(lam) U`` instead.
    """
    return FractionalFamily(decomp).shift_operator(a, literal)


@dataclass(frozen=True)
class JointFractionalBasis:
    """Kronecker pair ``V(a, b) = F_T(a) kron F_G(b)``, kept factored."""

    orders: tuple
    temporal: np.ndarray
    graph: np.ndarray
    joint_frac_eigenvalues: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.graph.shape[0]

    @property
    def t(self) -> int:
        return self.temporal.shape[0]

    @cached_property
    def joint_transform(self) -> np.ndarray:
        return np.kron(self.temporal, self.graph)

    def forward(self, X) -> np.ndarray:
        """Apply V to an N x T matrix (or a stack K x N x T); returns the matrix form."""
        return self.graph @ X @ self.temporal.T

    def inverse(self, S) -> np.ndarray:
        return self.graph.conj().T @ S @ self.temporal.conj()


def jfrft(basis_T: FractionalBasis, basis_G: FractionalBasis) -> JointFractionalBasis:
    """Joint time-vertex fractional Fourier transform of orders (a, b)."""
    lam = None
    if basis_T.frac_eigenvalues is not None and basis_G.frac_eigenvalues is not None:
        lam = np.kron(basis_T.frac_eigenvalues, basis_G.frac_eigenvalues)
    return JointFractionalBasis((basis_T.order, basis_G.order), basis_T.transform, basis_G.transform, lam)


def normalize_energy_preserving(L_frac, frac_eigs):
    """Scale an operator and its spectrum so the largest eigenvalue modulus is 1.

    An all-zero spectrum is returned unchanged.
    """
    eigs = np.asarray(frac_eigs)
    if eigs.size == 0:
        raise InvalidParameterError("eigenvalue list must be nonempty")
    m = float(np.abs(eigs).max())
    if m == 0.0:
        return np.asarray(L_frac), eigs
    return np.asarray(L_frac) / m, eigs / m


@dataclass(frozen=True)
class JointShifts:
    """Fractional temporal/graph shifts at orders (a, b) and their joint basis.

    ``L_T``/``L_G`` and ``eigs_T``/``eigs_G`` are energy-normalized when
    built with ``normalize=True``; ``basis`` diagonalizes both shifts.
    """

    basis: JointFractionalBasis
    L_T: np.ndarray
    L_G: np.ndarray
    eigs_T: np.ndarray
    eigs_G: np.ndarray

    @property
    def orders(self) -> tuple:
        return self.basis.orders


def joint_shifts(temporal: FractionalFamily, graph: FractionalFamily, a: float, b: float,
                 normalize: bool = True, literal: bool = False) -> JointShifts:
    """Fractional shifts of orders ``a`` (temporal) and ``b`` (graph)."""
    bT = temporal.basis(a)
    bG = graph.basis(b)
    L_T = _gfso_from_basis(bT, literal)
    L_G = _gfso_from_basis(bG, literal)
    eT, eG = bT.frac_eigenvalues, bG.frac_eigenvalues
    if normalize:
        L_T, eT = normalize_energy_preserving(L_T, eT)
        L_G, eG = normalize_energy_preserving(L_G, eG)
    basis = jfrft(bT, bG)
    if literal:
        # F diag F^H is diagonalized by F^H, not F
        basis = JointFractionalBasis(basis.orders, bT.transform.conj().T, bG.transform.conj().T,
                                     basis.joint_frac_eigenvalues)
    return JointShifts(basis, L_T, L_G, eT, eG)
