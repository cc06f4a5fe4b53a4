"""Affine symplectic maps for displacement, squeezing and linear-optical gates.

Gates are specified by their action on annihilation operators,

    a -> U a + W a^dagger   (+ alpha for displacements),

and mapped to the quadrature layout of :mod:`solitonlab.phase_space` with the
selector matrices ``Rq`` and ``Rp`` (``R = Rq q + Rp p``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .phase_space import AffineSymplectic, NotSymplectic, symplectic_error, SYMPLECTIC_TOL

UNITARITY_TOL = 1e-8


class NotUnitary(ValueError):
    """Raised when an interferometer matrix fails ``U^dagger U = I``."""


@dataclass(frozen=True)
class ComplexMode:
    """A complex gate parameter; displacement ``alpha`` or squeezing ``zeta``."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.re) and np.isfinite(self.im)):
            raise ValueError(f"non-finite parameter {self.re!r}+{self.im!r}j")

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexMode":
        z = complex(z)
        return cls(z.real, z.imag)

    @classmethod
    def polar(cls, r: float, theta: float) -> "ComplexMode":
        return cls(r * np.cos(theta), r * np.sin(theta))

    def __complex__(self):
        return complex(self.re, self.im)


@dataclass(frozen=True)
class EmbeddingMatrices:
    """``N x n`` selectors with ``R = Rq q + Rp p`` for interleaved ``R``."""

    Rq: np.ndarray
    Rp: np.ndarray


def embedding(n_modes: int) -> EmbeddingMatrices:
    N = 2 * n_modes
    Rq = np.zeros((N, n_modes))
    Rp = np.zeros((N, n_modes))
    Rq[0::2, :] = np.eye(n_modes)
    Rp[1::2, :] = np.eye(n_modes)
    return EmbeddingMatrices(Rq, Rp)


def _as_complex(z) -> complex:
    return complex(z)


def displacement_gate(alphas: Sequence) -> AffineSymplectic:
    """Glauber displacement ``a_j -> a_j + alpha_j``: identity ``M`` plus a shift.

    ``shift[2j] = sqrt(2) Re(alpha_j)``, ``shift[2j+1] = sqrt(2) Im(alpha_j)``.
    """
    alphas = np.array([_as_complex(a) for a in alphas], dtype=complex)
    n = alphas.size
    if n < 1:
        raise ValueError("need at least one mode")
    shift = np.empty(2 * n)
    shift[0::2] = np.sqrt(2) * alphas.real
    shift[1::2] = np.sqrt(2) * alphas.imag
    return AffineSymplectic(np.eye(2 * n), shift, check=False)


def squeeze_block(r: float, theta: float) -> np.ndarray:
    """2x2 symplectic block of ``a -> cosh(r) a - e^{i theta} sinh(r) a^dagger``."""
    ch, sh = np.cosh(r), np.sinh(r)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[ch - c * sh, -s * sh], [-s * sh, ch + c * sh]])


def squeeze_gate(n_modes: int, target_mode: int, r: float, theta: float) -> AffineSymplectic:
    """Single-mode squeezer on ``target_mode``, identity on all other modes."""
    if not 0 <= target_mode < n_modes:
        raise IndexError(f"target_mode {target_mode} out of range for {n_modes} modes")
    M = np.eye(2 * n_modes)
    k = 2 * target_mode
    M[k:k + 2, k:k + 2] = squeeze_block(r, theta)
    return AffineSymplectic(M, check=False)


def _symplectic_from_uw(U: np.ndarray, W: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    E = embedding(n)
    Rq, Rp = E.Rq, E.Rp
    M1 = Rq @ (U.real + W.real) @ Rq.T + Rp @ (U.real - W.real) @ Rp.T
    M2 = Rp @ (U.imag + W.imag) @ Rq.T + Rq @ (-U.imag + W.imag) @ Rp.T
    return M1 + M2


def interferometer_matrix(U: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic ``M`` of the passive map ``a -> U a`` (no checks).

    Interleaved layout makes this the Kronecker expansion of each entry
    ``U_jk = x + iy`` into the block ``[[x, -y], [y, x]]``.
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    M = np.empty((2 * n, 2 * n))
    M[0::2, 0::2] = U.real
    M[0::2, 1::2] = -U.imag
    M[1::2, 0::2] = U.imag
    M[1::2, 1::2] = U.real
    return M


def interferometer_gate(U) -> AffineSymplectic:
    """Passive linear-optical gate ``a -> U a`` for an ``n x n`` unitary ``U``."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"U must be square, got shape {U.shape}")
    err = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if not err <= UNITARITY_TOL:
        raise NotUnitary(f"max|U^dagger U - I| = {err:.3g}")
    M = _symplectic_from_uw(U, np.zeros_like(U))
    return AffineSymplectic(M)


def bogoliubov_gate(U, W) -> AffineSymplectic:
    """General linear gate ``a -> U a + W a^dagger``.

    Physical validity is checked on the output: ``M J M^T = J``. Pairs
    ``(U, W)`` that fail it are not unitary Bogoliubov maps.
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    if U.shape != W.shape or U.shape[0] != U.shape[1]:
        raise ValueError(f"U and W must be square of equal shape, got {U.shape}, {W.shape}")
    M = _symplectic_from_uw(U, W)
    err = symplectic_error(M)
    if not err <= SYMPLECTIC_TOL:
        raise NotSymplectic(f"unphysical Bogoliubov map: max|M J M^T - J| = {err:.3g}")
    return AffineSymplectic(M, check=False)
