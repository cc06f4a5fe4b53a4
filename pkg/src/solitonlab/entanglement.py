"""Logarithmic negativity of a bipartition from the covariance matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_space import GaussianState, symplectic_form

#: symplectic eigenvalues this close to 1/2 are snapped to 1/2
EIGEN_FLOOR = 1e-12
#: tolerance when matching +/- i c eigenvalue pairs
PAIRING_TOL = 1e-8


@dataclass(frozen=True)
class Bipartition:
    """The modes held by Alice; everything else belongs to Bob."""

    alice_modes: frozenset

    def __init__(self, alice_modes):
        if isinstance(alice_modes, (int, np.integer)):
            alice_modes = [alice_modes]
        object.__setattr__(self, "alice_modes", frozenset(int(j) for j in alice_modes))

    @classmethod
    def soliton_site(cls, n_modes: int) -> "Bipartition":
        """Alice at site ``floor(n/2) + 1``, where single solitons localize."""
        return cls([n_modes // 2 + 1])

    def validate(self, n_modes: int) -> None:
        a = self.alice_modes
        if not a or len(a) >= n_modes or min(a) < 0 or max(a) >= n_modes:
            raise ValueError(f"alice_modes {sorted(a)} is not a non-empty proper subset "
                             f"of {n_modes} modes")


def partial_transpose(state: GaussianState, part: Bipartition) -> np.ndarray:
    """Flip the sign of Alice's momenta: ``P g P`` with ``P = diag(+-1)``."""
    part.validate(state.n_modes)
    sign = np.ones(state.dim)
    for j in part.alice_modes:
        sign[2 * j + 1] = -1.0
    return state.g * np.outer(sign, sign)


def symplectic_eigenvalues(g, method: str = "pairing") -> np.ndarray:
    """Symplectic eigenvalues of a symmetric ``g``, ascending.

    ``"pairing"`` takes moduli of the eigenvalues of ``J^T g / 2`` and checks
    that they come in ``+/- i c`` pairs. ``"squared"`` uses the real spectrum
    of ``(J^T g / 2)^2 = -c^2`` and never touches complex pairs.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
        raise ValueError(f"g must be square with even size, got {g.shape}")
    if not np.allclose(g, g.T, atol=1e-12, rtol=0):
        raise ValueError("g must be symmetric")
    n = g.shape[0] // 2
    A = symplectic_form(n).T @ g / 2
    if method == "pairing":
        ev = np.linalg.eigvals(A)
        ev = ev[np.argsort(ev.imag)]
        # sorted by imaginary part, the first half pairs with the reversed second half
        lo, hi = ev[:n], ev[n:][::-1]
        if np.max(np.abs(lo + hi), initial=0) > PAIRING_TOL * max(1.0, np.max(np.abs(ev))):
            raise ValueError("eigenvalues of J^T g / 2 do not pair as +/- i c")
        c = np.abs(hi)
    elif method == "squared":
        w = np.linalg.eigvals(A @ A).real
        c = np.sqrt(np.abs(np.sort(w)))[::2]
    else:
        raise ValueError(f"unknown method {method!r}")
    c = np.sort(c)
    c[np.abs(c - 0.5) < EIGEN_FLOOR] = 0.5
    return c


def log_negativity(state: GaussianState, part: Bipartition | None = None) -> float:
    """``E_N = -sum_j log2 min(1, 2 c_j)`` over the partially transposed spectrum."""
    if part is None:
        part = Bipartition.soliton_site(state.n_modes)
    c = symplectic_eigenvalues(partial_transpose(state, part))
    return float(-np.sum(np.log2(np.minimum(1.0, 2 * c)))) + 0.0  # no negative zero
