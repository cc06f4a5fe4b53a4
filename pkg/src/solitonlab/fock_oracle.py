"""Brute-force truncated Fock-space simulator, used only to certify closed forms.

Nothing here touches covariance matrices. Single-mode squeezers and
displacements are exponentiated in a padded number basis and cut to ``D``
levels; the interferometer is ``exp(i sum_jk H_jk a_j^dag a_k)`` applied to
the full ``D**n`` tensor with a sparse Krylov exponential. That generator
conserves the total photon number, and is exact on every sector with fewer
than ``D`` photons, so the weight in sectors ``>= D`` is counted as leakage.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .ansatz import QsvaParams, hermitian_from_params

MAX_MODES = 4
MAX_CUTOFF = 64
DEFAULT_CUTOFF = 40
MAX_LEAKAGE = 1e-4
_PAD = 60


class CutoffTooSmall(ValueError):
    """The truncated space lost more norm than :data:`MAX_LEAKAGE`."""

    def __init__(self, leakage: float, cutoff: int):
        self.leakage = leakage
        self.suggested_cutoff = min(MAX_CUTOFF, 2 * cutoff)
        super().__init__(f"truncation leakage {leakage:.3g} at cutoff {cutoff}; "
                         f"try cutoff={self.suggested_cutoff}")


@dataclass(frozen=True, eq=False)
class FockVector:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray  # shape (cutoff,) * n_modes
    leakage: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


def single_mode_squeeze(r: float, theta: float, cutoff: int) -> np.ndarray:
    """``<m| exp((zeta* a^2 - zeta a^dag^2) / 2) |n>`` for ``m, n < cutoff``."""
    L = cutoff + _PAD
    a = annihilation(L)
    zeta = r * np.exp(1j * theta)
    gen = 0.5 * (np.conj(zeta) * a @ a - zeta * a.T @ a.T)
    return scipy.linalg.expm(gen)[:cutoff, :cutoff]


def single_mode_displace(alpha: complex, cutoff: int) -> np.ndarray:
    """``<m| exp(alpha a^dag - alpha* a) |n>`` for ``m, n < cutoff``."""
    L = cutoff + _PAD
    a = annihilation(L)
    gen = alpha * a.T - np.conj(alpha) * a
    return scipy.linalg.expm(gen)[:cutoff, :cutoff]


def _apply_local(psi: np.ndarray, op: np.ndarray, mode: int) -> np.ndarray:
    out = np.tensordot(op, psi, axes=([1], [mode]))
    return np.moveaxis(out, 0, mode)


def _mode_op(op, mode: int, n: int, cutoff: int):
    eye = sp.identity(cutoff, format="csr")
    mats = [sp.csr_matrix(op) if k == mode else eye for k in range(n)]
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), mats)


def passive_generator(H: np.ndarray, cutoff: int) -> sp.csr_matrix:
    """Sparse ``sum_jk H_jk a_j^dag a_k`` on the truncated ``cutoff**n`` space."""
    n = H.shape[0]
    a = annihilation(cutoff)
    lowers = [_mode_op(a, j, n, cutoff) for j in range(n)]
    K = sp.csr_matrix((cutoff**n, cutoff**n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if H[j, k] != 0:
                K = K + H[j, k] * (lowers[j].conj().T @ lowers[k])
    return K.tocsr()


def passive_unitary(H: np.ndarray, cutoff: int) -> np.ndarray:
    """Dense ``exp(i K)``; only sensible for tiny spaces (tests)."""
    return scipy.linalg.expm(1j * passive_generator(H, cutoff).toarray())


def _total_number(n: int, cutoff: int) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(cutoff)] * n, indexing="ij")
    return sum(grids)


def oracle_prepare(params: QsvaParams, cutoff: int = DEFAULT_CUTOFF) -> FockVector:
    """Squeeze, displace and mix the vacuum in the truncated number basis."""
    n = params.n_modes
    if n > MAX_MODES:
        raise ValueError(f"oracle supports at most {MAX_MODES} modes, got {n}")
    if not 2 <= cutoff <= MAX_CUTOFF:
        raise ValueError(f"cutoff must be in [2, {MAX_CUTOFF}], got {cutoff}")
    psi = np.zeros((cutoff,) * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for j in range(n):
        psi = _apply_local(psi, single_mode_squeeze(params.r[j], params.theta[j], cutoff), j)
    for j in range(n):
        psi = _apply_local(psi, single_mode_displace(params.deltas[j], cutoff), j)
    leak = max(0.0, 1.0 - float(np.vdot(psi, psi).real))
    H = hermitian_from_params(params.h, n)
    if np.any(H != 0):
        high = _total_number(n, cutoff) >= cutoff
        leak += float(np.sum(np.abs(psi[high]) ** 2))
        K = passive_generator(H, cutoff)
        psi = expm_multiply(1j * K, psi.reshape(-1)).reshape((cutoff,) * n)
    if leak > MAX_LEAKAGE:
        raise CutoffTooSmall(leak, cutoff)
    return FockVector(n, cutoff, psi, leak)


def _lower(psi: np.ndarray, mode: int) -> np.ndarray:
    """``a_mode psi``; exact, since lowering never leaves the truncated space."""
    D = psi.shape[mode]
    out = np.zeros_like(psi)
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[mode] = slice(1, D)
    dst[mode] = slice(0, D - 1)
    shape = [1] * psi.ndim
    shape[mode] = D - 1
    out[tuple(dst)] = psi[tuple(src)] * np.sqrt(np.arange(1, D)).reshape(shape)
    return out


def oracle_mean_photon(v: FockVector, j: int) -> float:
    a_psi = _lower(v.amplitudes, j)
    return float(np.vdot(a_psi, a_psi).real)


def oracle_quadratic(v: FockVector, j: int, k: int) -> complex:
    """``<a_j^dag a_k> = <a_j psi | a_k psi>``."""
    return complex(np.vdot(_lower(v.amplitudes, j), _lower(v.amplitudes, k)))


def oracle_quartic(v: FockVector, j: int) -> float:
    aa = _lower(_lower(v.amplitudes, j), j)
    return float(np.vdot(aa, aa).real)


def oracle_expectation(v: FockVector, h) -> float:
    """``<H>`` for a :class:`~solitonlab.observables.LatticeHamiltonian`."""
    n = v.n_modes
    if h.n_sites != n:
        raise ValueError(f"Hamiltonian has {h.n_sites} sites, vector {n} modes")
    lowered = [_lower(v.amplitudes, j) for j in range(n)]
    kin = 0.0
    for j in range(n):
        for k in range(n):
            if h.omega[j, k] != 0:
                kin += h.omega[j, k] * np.vdot(lowered[j], lowered[k])
    pot = sum(oracle_quartic(v, j) for j in range(n))
    return float(np.real(kin) + h.gamma / 2 * pot)


def oracle_pattern_probability(v: FockVector, pattern) -> float:
    counts = tuple(int(c) for c in getattr(pattern, "counts", pattern))
    if len(counts) != v.n_modes:
        raise ValueError(f"pattern has {len(counts)} modes, vector {v.n_modes}")
    if max(counts) >= v.cutoff:
        raise ValueError(f"pattern {counts} exceeds cutoff {v.cutoff}")
    return float(np.abs(v.amplitudes[counts]) ** 2)
