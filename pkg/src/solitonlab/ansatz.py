"""Squeeze -> displace -> mix circuit on the vacuum, parameterized for training.

Flat parameter layout (length ``n**2 + 4n``)::

    [Re delta (n), Im delta (n), r (n), theta (n), h (n**2)]

``h`` holds the Hermitian generator of the interferometer: ``n`` diagonal
entries followed by ``(Re, Im)`` of each upper-triangular entry in row-major
order. The interferometer is ``U = exp(i H)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import phase_space as ps
from .gates import ComplexMode, displacement_gate, interferometer_gate, squeeze_gate, squeeze_block
from .gates import interferometer_matrix


def n_params(n: int) -> int:
    return n * n + 4 * n


def _triu_pairs(n: int):
    return np.triu_indices(n, k=1)


def hermitian_from_params(h, n: int | None = None) -> np.ndarray:
    h = np.asarray(h, dtype=float).reshape(-1)
    if n is None:
        n = int(round(np.sqrt(h.size)))
    if h.size != n * n:
        raise ValueError(f"expected {n * n} generator parameters, got {h.size}")
    H = np.diag(h[:n]).astype(complex)
    rows, cols = _triu_pairs(n)
    off = h[n:].reshape(-1, 2)
    vals = off[:, 0] + 1j * off[:, 1]
    H[rows, cols] = vals
    H[cols, rows] = vals.conj()
    return H


def unitary_from_params(h) -> np.ndarray:
    """``exp(i H(h))`` via the eigendecomposition of the Hermitian ``H``."""
    h = np.asarray(h, dtype=float).reshape(-1)
    n = int(round(np.sqrt(h.size)))
    if n * n != h.size or n == 0:
        raise ValueError(f"generator length must be a perfect square, got {h.size}")
    lam, V = np.linalg.eigh(hermitian_from_params(h, n))
    return (V * np.exp(1j * lam)) @ V.conj().T


def unitary_vjp(h, grad_U: np.ndarray) -> np.ndarray:
    """Pull a gradient on ``U`` back to the generator parameters ``h``.

    ``grad_U = dL/dRe(U) + i dL/dIm(U)``, so that ``dL = Re tr(grad_U^H dU)``.
    Uses the divided-difference form of the exponential's derivative in the
    eigenbasis of ``H``.
    """
    h = np.asarray(h, dtype=float).reshape(-1)
    n = int(round(np.sqrt(h.size)))
    lam, V = np.linalg.eigh(hermitian_from_params(h, n))
    e = np.exp(1j * lam)
    dl = lam[:, None] - lam[None, :]
    close = np.abs(dl) < 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(close, 1j * e[:, None], (e[:, None] - e[None, :]) / np.where(close, 1, dl))
    # dU = V (phi o (V^H dH V)) V^H, phi_jk = (e_j - e_k) / (lam_j - lam_k)
    Gt = V.conj().T @ grad_U @ V
    GH = V @ (Gt * phi.conj()) @ V.conj().T
    out = np.empty(n * n)
    out[:n] = np.real(np.diag(GH))
    rows, cols = _triu_pairs(n)
    gjk, gkj = GH[rows, cols], GH[cols, rows]
    out[n::2] = np.real(gjk + gkj)
    out[n + 1::2] = np.imag(gjk) - np.imag(gkj)
    return out


@dataclass(frozen=True, eq=False)
class QsvaParams:
    """Trainable circuit parameters.

    Attributes:
        deltas: complex displacements, one per mode.
        r, theta: squeezing magnitude and angle per mode (``zeta = r e^{i theta}``).
        h: ``n**2`` reals for the interferometer generator.
    """

    deltas: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        deltas = np.array([complex(z) for z in np.ravel(self.deltas)], dtype=complex)
        r = np.array(self.r, dtype=float).reshape(-1)
        theta = np.mod(np.array(self.theta, dtype=float).reshape(-1), 2 * np.pi)
        h = np.array(self.h, dtype=float).reshape(-1)
        n = deltas.size
        if n < 1 or r.size != n or theta.size != n or h.size != n * n:
            raise ValueError(f"inconsistent parameter sizes: deltas={n}, r={r.size}, "
                             f"theta={theta.size}, h={h.size}")
        for a in (deltas, r, theta, h):
            if not np.all(np.isfinite(a)):
                raise ValueError("parameters must be finite")
            a.setflags(write=False)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "h", h)

    @property
    def n_modes(self) -> int:
        return self.deltas.size

    @property
    def zetas(self) -> list[ComplexMode]:
        return [ComplexMode.polar(r, t) for r, t in zip(self.r, self.theta)]

    @classmethod
    def zeros(cls, n: int) -> "QsvaParams":
        return cls(np.zeros(n, complex), np.zeros(n), np.zeros(n), np.zeros(n * n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, scale: float = 0.1) -> "QsvaParams":
        """Uniform(-scale, scale) draws for every real component."""
        return cls.from_vector(rng.uniform(-scale, scale, n_params(n)), n)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.deltas.real, self.deltas.imag, self.r, self.theta, self.h])

    @classmethod
    def from_vector(cls, v, n: int) -> "QsvaParams":
        v = np.asarray(v, dtype=float)
        if v.size != n_params(n):
            raise ValueError(f"expected {n_params(n)} parameters, got {v.size}")
        return cls(v[:n] + 1j * v[n:2 * n], v[2 * n:3 * n], v[3 * n:4 * n], v[4 * n:])

    def to_dict(self) -> dict:
        return {
            "deltas": [[float(z.real), float(z.imag)] for z in self.deltas],
            "zetas": [[float(r), float(t)] for r, t in zip(self.r, self.theta)],
            "h": [float(x) for x in self.h],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QsvaParams":
        deltas = [complex(a, b) for a, b in data["deltas"]]
        zetas = np.asarray(data["zetas"], dtype=float).reshape(-1, 2)
        return cls(deltas, zetas[:, 0], zetas[:, 1], data["h"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "QsvaParams":
        return cls.from_dict(json.loads(text))


def circuit(params: QsvaParams) -> list[ps.AffineSymplectic]:
    """Gates in physical order: one squeezer per mode, displacements, mixer."""
    n = params.n_modes
    gates = [squeeze_gate(n, j, params.r[j], params.theta[j]) for j in range(n)]
    gates.append(displacement_gate(params.deltas))
    gates.append(interferometer_gate(unitary_from_params(params.h)))
    return gates


def prepare_state(params: QsvaParams) -> ps.GaussianState:
    """Vacuum pushed through :func:`circuit` as a single composed map."""
    t = ps.compose_all(circuit(params))
    return ps.apply(ps.vacuum(params.n_modes), t)


# -- fast path used inside the training loop -----------------------------------


@dataclass
class _Forward:
    g1: np.ndarray  # squeezed-vacuum covariance
    d2: np.ndarray  # displacement before mixing
    O: np.ndarray   # interferometer symplectic matrix
    state: ps.GaussianState


def _squeezed_cov(r, theta) -> np.ndarray:
    n = r.size
    g1 = np.zeros((2 * n, 2 * n))
    for j in range(n):
        # squeeze blocks are symmetric, so S S^T = S(2r, theta)
        g1[2 * j:2 * j + 2, 2 * j:2 * j + 2] = squeeze_block(2 * r[j], theta[j])
    return g1


def forward(vec: np.ndarray, n: int) -> _Forward:
    """Same state as :func:`prepare_state`, built directly from a flat vector."""
    re, im = vec[:n], vec[n:2 * n]
    r, theta, h = vec[2 * n:3 * n], vec[3 * n:4 * n], vec[4 * n:]
    g1 = _squeezed_cov(r, theta)
    d2 = np.empty(2 * n)
    d2[0::2] = np.sqrt(2) * re
    d2[1::2] = np.sqrt(2) * im
    O = interferometer_matrix(unitary_from_params(h))
    state = ps._from_trusted(n, O @ g1 @ O.T, O @ d2)
    return _Forward(g1, d2, O, state)


def backward(vec: np.ndarray, n: int, fw: _Forward, G: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Chain rule from ``(dL/dg, dL/dd)`` to the flat parameter vector."""
    O, g1, d2 = fw.O, fw.g1, fw.d2
    grad = np.zeros_like(vec)
    # d = O d2, g = O g1 O^T
    GO = (G + G.T) @ O @ g1 + np.outer(D, d2)
    G1 = O.T @ G @ O
    D2 = O.T @ D
    grad[:n] = np.sqrt(2) * D2[0::2]
    grad[n:2 * n] = np.sqrt(2) * D2[1::2]
    r, theta = vec[2 * n:3 * n], vec[3 * n:4 * n]
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    c, s = np.cos(theta), np.sin(theta)
    a = G1[0::2, 0::2].diagonal()
    b = G1[0::2, 1::2].diagonal() + G1[1::2, 0::2].diagonal()
    cc = G1[1::2, 1::2].diagonal()
    # block = [[ch - c sh, -s sh], [-s sh, ch + c sh]] at 2r
    grad[2 * n:3 * n] = 2 * (a * (sh - c * ch) + b * (-s * ch) + cc * (sh + c * ch))
    grad[3 * n:4 * n] = a * (s * sh) + b * (-c * sh) + cc * (-s * sh)
    # O = interferometer_matrix(U): U_R at [0::2,0::2] and [1::2,1::2], U_I at [1::2,0::2] and -[0::2,1::2]
    gUr = GO[0::2, 0::2] + GO[1::2, 1::2]
    gUi = GO[1::2, 0::2] - GO[0::2, 1::2]
    grad[4 * n:] = unitary_vjp(vec[4 * n:], gUr + 1j * gUi)
    return grad
