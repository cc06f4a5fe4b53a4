"""Normal-ordered expectation values of Gaussian states in closed form.

All quantities are algebraic in ``g`` and ``d``; no derivatives of the
characteristic function are taken numerically. With ``q = x[2j]`` and
``p = x[2j+1]`` the relevant derivatives at the origin are

    d^2 chi_R / dx_m dx_n = -g_mn / 2 - d_m d_n
    d^4 chi / dq^4        = 3/4 g_qq^2 + 3 g_qq d_q^2 + d_q^4
    d^4 chi / dq^2 dp^2   = 1/4 g_qq g_pp + 1/2 g_qp^2 + 1/2 g_pp d_q^2
                            + 1/2 g_qq d_p^2 + 2 g_qp d_q d_p + d_q^2 d_p^2
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .phase_space import GaussianState, InvalidDimension


def hopping_matrix(n_sites: int) -> np.ndarray:
    """Nearest-neighbour hopping ``-1`` on an open chain."""
    if n_sites < 1:
        raise InvalidDimension(f"n_sites must be positive, got {n_sites}")
    return -(np.eye(n_sites, k=1) + np.eye(n_sites, k=-1))


@dataclass(frozen=True, eq=False)
class LatticeHamiltonian:
    """``H = sum_jk omega_jk a_j^dag a_k + gamma/2 sum_j a_j^dag a_j^dag a_j a_j``.

    ``omega`` may be complex but must be Hermitian; :meth:`chain` builds the
    default open chain.
    """

    n_sites: int
    gamma: float
    omega: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega)
        if omega.shape != (self.n_sites, self.n_sites):
            raise InvalidDimension(f"omega has shape {omega.shape}, expected "
                                   f"{(self.n_sites, self.n_sites)}")
        if not np.allclose(omega, omega.conj().T, atol=1e-12):
            raise ValueError("omega must be Hermitian")
        if not np.isrealobj(omega) and np.all(omega.imag == 0):
            omega = omega.real
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "gamma", float(self.gamma))

    @classmethod
    def chain(cls, n_sites: int, gamma: float) -> "LatticeHamiltonian":
        return cls(n_sites, gamma, hopping_matrix(n_sites))


def _check_mode(state: GaussianState, j: int) -> None:
    if not 0 <= j < state.n_modes:
        raise IndexError(f"mode {j} out of range for {state.n_modes} modes")


def mean_photon(state: GaussianState, j: int) -> float:
    """``<a_j^dag a_j>``."""
    _check_mode(state, j)
    g, d = state.g, state.d
    q, p = 2 * j, 2 * j + 1
    return float((g[q, q] + g[p, p]) / 4 + (d[q] ** 2 + d[p] ** 2) / 2 - 0.5)


def photon_numbers(state: GaussianState) -> np.ndarray:
    """Vector of ``<a_j^dag a_j>`` for every mode."""
    g, d = state.g, state.d
    diag = np.diag(g)
    return (diag[0::2] + diag[1::2]) / 4 + (d[0::2] ** 2 + d[1::2] ** 2) / 2 - 0.5


def total_photon(state: GaussianState) -> float:
    return float(np.sum(photon_numbers(state)))


def displacement_intensity(state: GaussianState, j: int) -> float:
    """``|<a_j>|^2 = (d_2j^2 + d_2j+1^2) / 2``."""
    _check_mode(state, j)
    return float((state.d[2 * j] ** 2 + state.d[2 * j + 1] ** 2) / 2)


def correlation_matrix(state: GaussianState) -> np.ndarray:
    """Hermitian matrix ``C[j, k] = <a_j^dag a_k>``.

    Obtained from ``<R_a R_b> = (g_ab + i J_ab) / 2 + d_a d_b`` with
    ``a_j = (q_j + i p_j) / sqrt(2)``.
    """
    g, d = state.g, state.d
    gqq, gpp = g[0::2, 0::2], g[1::2, 1::2]
    gqp, gpq = g[0::2, 1::2], g[1::2, 0::2]
    dq, dp = d[0::2], d[1::2]
    re = (gqq + gpp) / 4 + (np.outer(dq, dq) + np.outer(dp, dp)) / 2 - 0.5 * np.eye(state.n_modes)
    im = (gqp - gpq) / 4 + (np.outer(dq, dp) - np.outer(dp, dq)) / 2
    return re + 1j * im


def quadratic_expectation(state: GaussianState, j: int, k: int) -> complex:
    """``<a_j^dag a_k>``; equals :func:`mean_photon` on the diagonal."""
    _check_mode(state, j)
    _check_mode(state, k)
    g, d = state.g, state.d
    qj, pj, qk, pk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
    re = (g[qj, qk] + g[pj, pk]) / 4 + (d[qj] * d[qk] + d[pj] * d[pk]) / 2 - 0.5 * (j == k)
    im = (g[qj, pk] - g[pj, qk]) / 4 + (d[qj] * d[pk] - d[pj] * d[qk]) / 2
    return complex(re, im)


def _fourth_moments(gqq, gpp, gqp, dq, dp):
    """Return ``(d4 chi/dq^4, d4 chi/dp^4, d4 chi/dq^2dp^2)`` at the origin."""
    d4q = 0.75 * gqq**2 + 3 * gqq * dq**2 + dq**4
    d4p = 0.75 * gpp**2 + 3 * gpp * dp**2 + dp**4
    d4qp = (0.25 * gqq * gpp + 0.5 * gqp**2 + 0.5 * gpp * dq**2 + 0.5 * gqq * dp**2
            + 2 * gqp * dq * dp + dq**2 * dp**2)
    return d4q, d4p, d4qp


def _quartic(gqq, gpp, gqp, dq, dp):
    # <a^dag a^dag a a> = 1/4 (dq^2+dp^2)^2 chi_R + (dq^2+dp^2) chi_R + 1/2
    d4q, d4p, d4qp = _fourth_moments(gqq, gpp, gqp, dq, dp)
    lap2 = d4q + 2 * d4qp + d4p
    lap = -(gqq + gpp) / 2 - (dq**2 + dp**2)
    return 0.25 * lap2 + lap + 0.5


def _site_blocks(state: GaussianState):
    g, d = state.g, state.d
    diag = np.diag(g)
    return diag[0::2], diag[1::2], np.diag(g, 1)[0::2], d[0::2], d[1::2]


def quartic_expectation(state: GaussianState, j: int) -> float:
    """``<a_j^dag a_j^dag a_j a_j>`` from the fourth-derivative identities."""
    _check_mode(state, j)
    g, d = state.g, state.d
    q, p = 2 * j, 2 * j + 1
    return float(_quartic(g[q, q], g[p, p], g[q, p], d[q], d[p]))


def quartic_all(state: GaussianState) -> np.ndarray:
    return _quartic(*_site_blocks(state))


def kinetic_expectation(state: GaussianState, omega) -> float:
    """``<K> = sum_jk omega_jk <a_j^dag a_k>``; real for Hermitian ``omega``."""
    C = correlation_matrix(state)
    return float(np.real(np.sum(np.asarray(omega) * C)))


def interaction_expectation(state: GaussianState, gamma: float) -> float:
    if gamma == 0:
        return 0.0
    return float(gamma / 2 * np.sum(quartic_all(state)))


def hamiltonian_expectation(state: GaussianState, h: LatticeHamiltonian) -> float:
    if state.n_modes != h.n_sites:
        raise InvalidDimension(f"state has {state.n_modes} modes, Hamiltonian {h.n_sites} sites")
    return kinetic_expectation(state, h.omega) + interaction_expectation(state, h.gamma)


# -- gradients with respect to (g, d) -------------------------------------------
#
# Each returns (dF/dg, dF/dd) treating every entry of g as independent; entries
# that are not read have zero gradient.


def photon_number_grad(state: GaussianState, j: int):
    N = state.dim
    G = np.zeros((N, N))
    q, p = 2 * j, 2 * j + 1
    G[q, q] = G[p, p] = 0.25
    D = np.zeros(N)
    D[q], D[p] = state.d[q], state.d[p]
    return G, D


def total_photon_grad(state: GaussianState):
    N = state.dim
    return 0.25 * np.eye(N), np.array(state.d, dtype=float)


def kinetic_grad(state: GaussianState, omega):
    """Gradient of :func:`kinetic_expectation` for Hermitian ``omega``."""
    omega = np.asarray(omega)
    wr, wi = omega.real, omega.imag
    n = state.n_modes
    N = 2 * n
    G = np.zeros((N, N))
    G[0::2, 0::2] = wr / 4
    G[1::2, 1::2] = wr / 4
    # Re(w * i * im) = -wi * im
    G[0::2, 1::2] = -wi / 4
    G[1::2, 0::2] = wi / 4
    d = state.d
    dq, dp = d[0::2], d[1::2]
    ws = wr + wr.T
    wa = wi - wi.T
    D = np.zeros(N)
    D[0::2] = (ws @ dq) / 2 - (wa @ dp) / 2
    D[1::2] = (ws @ dp) / 2 + (wa @ dq) / 2
    return G, D


def quartic_grad_all(state: GaussianState):
    """Gradient of ``sum_j <a_j^dag a_j^dag a_j a_j>``."""
    gqq, gpp, gqp, dq, dp = _site_blocks(state)
    # dQ/dvar for Q = 1/4 (d4q + 2 d4qp + d4p) - (gqq+gpp)/2 - (dq^2+dp^2) + 1/2
    d_gqq = 0.25 * (1.5 * gqq + 3 * dq**2 + 2 * (0.25 * gpp + 0.5 * dp**2)) - 0.5
    d_gpp = 0.25 * (1.5 * gpp + 3 * dp**2 + 2 * (0.25 * gqq + 0.5 * dq**2)) - 0.5
    d_gqp = 0.25 * 2 * (gqp + 2 * dq * dp)
    d_dq = 0.25 * (6 * gqq * dq + 4 * dq**3 + 2 * (gpp * dq + 2 * gqp * dp + 2 * dq * dp**2)) - 2 * dq
    d_dp = 0.25 * (6 * gpp * dp + 4 * dp**3 + 2 * (gqq * dp + 2 * gqp * dq + 2 * dq**2 * dp)) - 2 * dp
    N = state.dim
    G = np.zeros((N, N))
    idx = np.arange(state.n_modes)
    G[2 * idx, 2 * idx] = d_gqq
    G[2 * idx + 1, 2 * idx + 1] = d_gpp
    G[2 * idx, 2 * idx + 1] = d_gqp
    D = np.zeros(N)
    D[0::2] = d_dq
    D[1::2] = d_dp
    return G, D


def hamiltonian_grad(state: GaussianState, h: LatticeHamiltonian):
    G, D = kinetic_grad(state, h.omega)
    if h.gamma != 0:
        Gv, Dv = quartic_grad_all(state)
        G = G + h.gamma / 2 * Gv
        D = D + h.gamma / 2 * Dv
    return G, D


def site_profile_csv(state: GaussianState) -> str:
    """CSV text with columns ``site, mean_photon, displacement_intensity``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["site", "mean_photon", "displacement_intensity"])
    n = photon_numbers(state)
    for j in range(state.n_modes):
        w.writerow([j, repr(float(n[j])), repr(displacement_intensity(state, j))])
    return buf.getvalue()
