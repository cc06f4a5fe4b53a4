"""Gaussian states in the interleaved quadrature layout ``(q0, p0, q1, p1, ...)``.

A state is fully described by its covariance matrix ``g`` (vacuum is the
identity, hbar = 1) and its displacement vector ``d``. Linear gates act on
states through affine symplectic maps ``R -> M R + shift``, so that

    g' = M g M^T,    d' = M d + shift.

Everything here uses symmetric ordering; normal-ordered observables subtract
the half-quantum per mode explicitly (see :mod:`solitonlab.observables`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

#: admissibility tolerance on the uncertainty relation 2 c_j >= 1
ADMISSIBILITY_TOL = 1e-9
#: tolerance on M J M^T = J
SYMPLECTIC_TOL = 1e-10
#: central-difference step used by :func:`numeric_moments`
FD_STEP = 1e-3


class InvalidDimension(ValueError):
    """Raised for non-positive mode counts or mismatched array shapes."""


class InadmissibleState(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


class NotSymplectic(ValueError):
    """Raised when a transform fails M J M^T = J."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one ``[[0, 1], [-1, 0]]`` block per mode."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidDimension(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes)), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_spectrum(g: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of ``J^T g / 2``, one per mode, ascending.

    The eigenvalues come in ``+/- i c`` pairs; each pair is collapsed by
    keeping every other sorted modulus.
    """
    g = np.asarray(g, dtype=float)
    J = symplectic_form(g.shape[0] // 2)
    moduli = np.sort(np.abs(np.linalg.eigvals(J.T @ g / 2)))
    return moduli[::2]


def _check_square(a: np.ndarray, n: int, name: str) -> None:
    if a.shape != (n, n):
        raise InvalidDimension(f"{name} has shape {a.shape}, expected {(n, n)}")


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Covariance matrix ``g`` and displacement ``d`` of an ``n_modes`` state.

    ``g`` is symmetrized on construction and the state is rejected if any
    symplectic eigenvalue falls below ``(1 - ADMISSIBILITY_TOL) / 2``.
    Arrays are stored read-only.
    """

    n_modes: int
    g: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        n = self.n_modes
        if int(n) != n or n < 1:
            raise InvalidDimension(f"n_modes must be a positive integer, got {n!r}")
        N = 2 * n
        g = np.array(self.g, dtype=float)
        d = np.array(self.d, dtype=float).reshape(-1)
        _check_square(g, N, "g")
        if d.shape != (N,):
            raise InvalidDimension(f"d has shape {d.shape}, expected {(N,)}")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(d))):
            raise InadmissibleState("g and d must be finite")
        g = (g + g.T) / 2
        c = symplectic_spectrum(g)
        if np.any(2 * c < 1 - ADMISSIBILITY_TOL):
            raise InadmissibleState(
                f"uncertainty relation violated: min 2c = {2 * c.min():.3g}"
            )
        g.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "n_modes", int(n))
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "d", d)

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "g": [float(v) for v in self.g.ravel()],
            "d": [float(v) for v in self.d],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        n = int(data["n_modes"])
        g = np.asarray(data["g"], dtype=float).reshape(2 * n, 2 * n)
        return cls(n, g, np.asarray(data["d"], dtype=float))

    def to_json(self) -> str:
        # repr of a Python float is the shortest string that round-trips exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GaussianState":
        return cls.from_dict(json.loads(text))


def _from_trusted(n_modes: int, g: np.ndarray, d: np.ndarray) -> GaussianState:
    """Build a state without the admissibility eigen-check.

    Only for results of symplectic maps applied to admissible states, which
    preserve the spectrum exactly; this keeps the training loop cheap.
    """
    state = object.__new__(GaussianState)
    g = (g + g.T) / 2
    g.setflags(write=False)
    d = np.array(d, dtype=float)
    d.setflags(write=False)
    object.__setattr__(state, "n_modes", n_modes)
    object.__setattr__(state, "g", g)
    object.__setattr__(state, "d", d)
    return state


def vacuum(n_modes: int) -> GaussianState:
    N = 2 * n_modes if int(n_modes) == n_modes and n_modes >= 1 else None
    if N is None:
        raise InvalidDimension(f"n_modes must be a positive integer, got {n_modes!r}")
    return GaussianState(int(n_modes), np.eye(N), np.zeros(N))


@dataclass(frozen=True, eq=False)
class AffineSymplectic:
    """The affine map ``R -> M R + shift`` induced by a Gaussian unitary.

    Args:
        M: real ``N x N`` symplectic matrix.
        shift: real ``N`` vector added after the linear part.
        check: verify ``M J M^T = J`` within ``SYMPLECTIC_TOL``.
    """

    M: np.ndarray
    shift: np.ndarray

    def __init__(self, M, shift=None, check: bool = True):
        M = np.array(M, dtype=float)
        N = M.shape[0]
        if M.ndim != 2 or M.shape != (N, N) or N % 2 or N == 0:
            raise InvalidDimension(f"M must be square with even size, got {M.shape}")
        shift = np.zeros(N) if shift is None else np.array(shift, dtype=float).reshape(-1)
        if shift.shape != (N,):
            raise InvalidDimension(f"shift has shape {shift.shape}, expected {(N,)}")
        if check:
            err = symplectic_error(M)
            if not err <= SYMPLECTIC_TOL:
                raise NotSymplectic(f"max|M J M^T - J| = {err:.3g}")
        M.setflags(write=False)
        shift.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "shift", shift)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    @classmethod
    def identity(cls, n_modes: int) -> "AffineSymplectic":
        N = symplectic_form(n_modes).shape[0]
        return cls(np.eye(N), np.zeros(N), check=False)


def symplectic_error(M: np.ndarray) -> float:
    """``max |M J M^T - J|`` for a square even-sized ``M``."""
    M = np.asarray(M, dtype=float)
    J = symplectic_form(M.shape[0] // 2)
    return float(np.max(np.abs(M @ J @ M.T - J)))


def apply(state: GaussianState, t: AffineSymplectic) -> GaussianState:
    """Push ``state`` through the gate ``t``: ``g -> M g M^T``, ``d -> M d + shift``."""
    if state.dim != t.dim:
        raise InvalidDimension(f"state has dimension {state.dim}, transform {t.dim}")
    M = t.M
    return _from_trusted(state.n_modes, M @ state.g @ M.T, M @ state.d + t.shift)


def compose(first: AffineSymplectic, second: AffineSymplectic) -> AffineSymplectic:
    """Single transform equivalent to applying ``first`` and then ``second``."""
    if first.dim != second.dim:
        raise InvalidDimension(f"dimensions differ: {first.dim} vs {second.dim}")
    M = second.M @ first.M
    return AffineSymplectic(M, second.M @ first.shift + second.shift, check=False)


def compose_all(transforms) -> AffineSymplectic:
    """Fold :func:`compose` over gates listed in physical (application) order."""
    transforms = list(transforms)
    if not transforms:
        raise ValueError("need at least one transform")
    out = transforms[0]
    for t in transforms[1:]:
        out = compose(out, t)
    return out


def invert(t: AffineSymplectic) -> AffineSymplectic:
    """Inverse map, using ``M^-1 = J M^T J^T``."""
    err = symplectic_error(t.M)
    if not err <= SYMPLECTIC_TOL:
        raise NotSymplectic(f"cannot invert non-symplectic map: error {err:.3g}")
    J = symplectic_form(t.dim // 2)
    Minv = J @ t.M.T @ J.T
    return AffineSymplectic(Minv, -Minv @ t.shift, check=False)


def char_fn(state: GaussianState, x) -> complex:
    """Symmetric-ordered characteristic function ``exp(-x g x / 4 + i x.d)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (state.dim,):
        raise InvalidDimension(f"x has shape {x.shape}, expected {(state.dim,)}")
    return complex(np.exp(-0.25 * x @ state.g @ x + 1j * (x @ state.d)))


def _central_moments(state: GaussianState, h: float):
    N = state.dim
    eye = np.eye(N)

    def chi(x):
        return char_fn(state, x)

    d1 = np.array([(chi(h * eye[q]).imag - chi(-h * eye[q]).imag) / (2 * h)
                   for q in range(N)])
    c0 = chi(np.zeros(N)).real
    hess = np.empty((N, N))
    for p in range(N):
        hess[p, p] = (chi(h * eye[p]).real - 2 * c0 + chi(-h * eye[p]).real) / h**2
        for q in range(p + 1, N):
            ep, eq = eye[p], eye[q]
            v = (chi(h * (ep + eq)).real - chi(h * (ep - eq)).real
                 - chi(h * (eq - ep)).real + chi(-h * (ep + eq)).real) / (4 * h**2)
            hess[p, q] = hess[q, p] = v
    return d1, hess


def numeric_moments(state: GaussianState, h: float = FD_STEP):
    """Recover ``(d, g)`` from central differences of :func:`char_fn` at 0.

    ``d_q = d chi_I / dx_q`` and
    ``g_pq = -2 d^2 chi_R / dx_p dx_q - 2 (d chi_I / dx_p)(d chi_I / dx_q)``.
    Differences at steps ``h`` and ``h/2`` are Richardson-combined. Only the
    characteristic function is consulted, never ``state.g``.
    """
    d_h, hess_h = _central_moments(state, h)
    d_h2, hess_h2 = _central_moments(state, h / 2)
    d_est = (4 * d_h2 - d_h) / 3
    hess = (4 * hess_h2 - hess_h) / 3
    g_est = -2 * hess - 2 * np.outer(d_est, d_est)
    return d_est, g_est
