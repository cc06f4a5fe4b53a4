import numpy as np
import pytest
from hypothesis import settings

from solitonlab import ansatz
from solitonlab import phase_space as ps
from solitonlab.validate import random_circuit

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def rng_for(seed):
    return np.random.default_rng(seed)


def random_symplectic(n, rng, r_max=1.0):
    """A random affine symplectic map built from the ansatz gate set."""
    gates = ansatz.circuit(random_circuit(n, rng, r_max=r_max))
    return ps.compose_all([gates[i] for i in rng.permutation(len(gates))])


def random_state(n, rng, **kw):
    return ansatz.prepare_state(random_circuit(n, rng, **kw))


def chi_quartic(state, j, h=5e-2):
    """``<a^dag^2 a^2>`` from finite differences of ``chi``, Richardson-extrapolated.

    ``1/4 (d_q^2 + d_p^2)^2 chi + (d_q^2 + d_p^2) chi + 1/2`` at the origin.
    """
    q, p = 2 * j, 2 * j + 1

    def f(u, v):
        x = np.zeros(state.dim)
        x[q], x[p] = u, v
        return ps.char_fn(state, x).real

    def estimate(h):
        w4, w2 = [1, -4, 6, -4, 1], [1, -2, 1]
        d4q = sum(c * f((k - 2) * h, 0) for k, c in enumerate(w4)) / h**4
        d4p = sum(c * f(0, (k - 2) * h) for k, c in enumerate(w4)) / h**4
        d22 = sum(a * b * f((i - 1) * h, (k - 1) * h)
                  for i, a in enumerate(w2) for k, b in enumerate(w2)) / h**4
        lap = sum(c * (f((k - 1) * h, 0) + f(0, (k - 1) * h)) for k, c in enumerate(w2)) / h**2
        return 0.25 * (d4q + 2 * d22 + d4p) + lap + 0.5

    return (4 * estimate(h / 2) - estimate(h)) / 3


def chi_quadratic(state, j, k):
    """``<a_j^dag a_k>`` rebuilt from the numerically differentiated moments."""
    d, g = ps.numeric_moments(state)
    qj, pj, qk, pk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
    # symmetric-ordered <R_a R_b> = g_ab / 2 + d_a d_b, plus the commutator term
    sym = g / 2 + np.outer(d, d)
    re = (sym[qj, qk] + sym[pj, pk]) / 2 - 0.5 * (j == k)
    im = (sym[qj, pk] - sym[pj, qk]) / 2
    return complex(re, im)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
