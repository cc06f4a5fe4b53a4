"""Photon-number pattern probabilities of Gaussian states.

For a pattern ``n`` the probability is the diagonal density-matrix element

    Pr(n) = prod_j n_j! * [alpha^n alpha*^n] F(alpha, alpha*),
    F = exp(sum_j |alpha_j|^2) <alpha|rho|alpha>,

where ``[.]`` extracts a coefficient. ``F`` is the exponential of a quadratic
polynomial in the independent variables ``(alpha, alpha*)``, so the
coefficient follows from a truncated multivariate power series of that
exponential. Only modes with ``n_j > 0`` carry variables; the others are
evaluated at ``alpha_j = 0``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .phase_space import GaussianState

DEFAULT_BUDGET = 6


class PatternBudgetExceeded(ValueError):
    """Raised when a pattern asks for more photons than the budget allows."""


@dataclass(frozen=True)
class PhotonPattern:
    counts: tuple
    budget: int = DEFAULT_BUDGET

    def __init__(self, counts, budget: int = DEFAULT_BUDGET):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"photon counts must be non-negative, got {counts}")
        if sum(counts) > budget:
            raise PatternBudgetExceeded(f"pattern {counts} has {sum(counts)} photons, "
                                        f"budget is {budget}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "budget", int(budget))

    @property
    def total(self) -> int:
        return sum(self.counts)


def _generating_function(state: GaussianState):
    """Quadratic form ``A``, linear term ``b`` and prefactor of ``log F``.

    Variables are ordered ``(alpha_0..alpha_{n-1}, alpha*_0..alpha*_{n-1})``.
    In quadratures ``x = sqrt(2) (Re alpha, Im alpha)`` the Husimi function
    is ``exp(-(x-d) S^-1 (x-d) / 2) / sqrt(det S)`` with ``S = (g + 1) / 2``.
    """
    n, N = state.n_modes, state.dim
    S = (state.g + np.eye(N)) / 2
    Sinv = np.linalg.inv(S)
    _, logdet = np.linalg.slogdet(S)
    B = np.eye(N) - Sinv
    # x = T @ (alpha, alpha*):  q = (a + a*)/sqrt2,  p = (a - a*)/(i sqrt2)
    T = np.zeros((N, N), dtype=complex)
    idx = np.arange(n)
    T[2 * idx, idx] = 1 / np.sqrt(2)
    T[2 * idx, n + idx] = 1 / np.sqrt(2)
    T[2 * idx + 1, idx] = -1j / np.sqrt(2)
    T[2 * idx + 1, n + idx] = 1j / np.sqrt(2)
    A = T.T @ B @ T
    b = T.T @ (Sinv @ state.d)
    log_pref = -0.5 * state.d @ Sinv @ state.d - 0.5 * logdet
    return A, b, log_pref


def _series_coefficient(A: np.ndarray, b: np.ndarray, caps: list[int]) -> complex:
    """Coefficient of ``prod x_i^caps_i`` in ``exp(x A x / 2 + b x)``."""
    m = len(caps)
    shape = tuple(c + 1 for c in caps)
    target = sum(caps)
    # monomials of the exponent: (exponent tuple, coefficient)
    terms = []
    for i in range(m):
        if b[i] != 0:
            e = [0] * m
            e[i] = 1
            terms.append((tuple(e), b[i]))
        for k in range(i, m):
            coef = A[i, i] / 2 if k == i else A[i, k]
            if coef != 0:
                e = [0] * m
                e[i] += 1
                e[k] += 1
                terms.append((tuple(e), coef))
    total = np.zeros(shape, dtype=complex)
    power = np.zeros(shape, dtype=complex)
    power[(0,) * m] = 1.0
    total += power
    for order in range(1, target + 1):
        nxt = np.zeros(shape, dtype=complex)
        for e, coef in terms:
            if any(ei > ci for ei, ci in zip(e, caps)):
                continue
            dst = tuple(slice(ei, None) for ei in e)
            src = tuple(slice(0, s - ei) for ei, s in zip(e, shape))
            nxt[dst] += coef * power[src]
        power = nxt / order
        total += power
    return total[tuple(caps)]


def pattern_probability(state: GaussianState, pattern) -> float:
    """Probability of detecting ``pattern`` photons (photon-number resolving)."""
    if not isinstance(pattern, PhotonPattern):
        pattern = PhotonPattern(pattern)
    counts = pattern.counts
    n = state.n_modes
    if len(counts) != n:
        raise ValueError(f"pattern has {len(counts)} modes, state has {n}")
    A, b, log_pref = _generating_function(state)
    active = [j for j in range(n) if counts[j] > 0]
    sel = active + [n + j for j in active]
    caps = [counts[j] for j in active] * 2
    coef = _series_coefficient(A[np.ix_(sel, sel)], b[sel], caps) if active else 1.0
    fact = math.prod(math.factorial(c) for c in counts)
    p = np.exp(log_pref) * fact * coef
    if abs(p.imag) > 1e-8 * max(1.0, abs(p.real)):
        raise ValueError(f"non-real probability {p}; state is not admissible")
    return float(min(max(p.real, 0.0), 1.0))


def pair_probability_scan(state: GaussianState, total: int) -> np.ndarray:
    """Probabilities of ``total`` photons split over two sites, zero elsewhere.

    Entry ``(A, B)`` with ``A != B`` holds ``total/2`` photons at each site;
    the diagonal ``(A, A)`` holds all ``total`` photons at ``A``.
    """
    if total not in (2, 4):
        raise ValueError(f"total must be 2 or 4, got {total}")
    n = state.n_modes
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            counts = [0] * n
            if a == b:
                counts[a] = total
            else:
                counts[a] = counts[b] = total // 2
            out[a, b] = out[b, a] = pattern_probability(state, counts)
    return out


def pair_scan_csv(scan: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["site_a", "site_b", "probability"])
    n = scan.shape[0]
    for a in range(n):
        for b in range(n):
            w.writerow([a, b, repr(float(scan[a, b]))])
    return buf.getvalue()
