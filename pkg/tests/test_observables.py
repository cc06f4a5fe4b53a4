import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import chi_quadratic, chi_quartic, random_state, rng_for
from solitonlab import fock_oracle as fo
from solitonlab import gates
from solitonlab import observables as ob
from solitonlab import phase_space as ps
from solitonlab.ansatz import QsvaParams, unitary_from_params

seeds = st.integers(0, 2**32 - 1)


def coherent(alphas):
    return ps.apply(ps.vacuum(len(alphas)), gates.displacement_gate(alphas))


def squeezed(r, theta=0.0, alpha=0.0):
    s = ps.apply(ps.vacuum(1), gates.squeeze_gate(1, 0, r, theta))
    return ps.apply(s, gates.displacement_gate([alpha]))


def test_lattice_default_hopping():
    h = ob.LatticeHamiltonian.chain(5, -1.0)
    om = h.omega
    assert np.array_equal(om, om.T)
    for i in range(5):
        for j in range(5):
            assert om[i, j] == (-1.0 if abs(i - j) == 1 else 0.0)
    assert np.count_nonzero(om[0]) == 1 and np.count_nonzero(om[-1]) == 1


def test_lattice_rejects_non_hermitian():
    with pytest.raises(ValueError):
        ob.LatticeHamiltonian(2, -1.0, [[0, 1], [0, 0]])


def test_mean_photon_vacuum_coherent_squeezed():
    assert ob.mean_photon(ps.vacuum(2), 1) == 0.0
    assert ob.mean_photon(coherent([0.3 + 1.2j]), 0) == pytest.approx(abs(0.3 + 1.2j) ** 2,
                                                                    abs=1e-14)
    r = 0.9
    assert ob.mean_photon(squeezed(r, 0.4), 0) == pytest.approx(np.sinh(r) ** 2, abs=1e-13)


def test_mean_photon_index_error():
    with pytest.raises(IndexError):
        ob.mean_photon(ps.vacuum(2), 2)


def test_total_photon():
    assert ob.total_photon(ps.vacuum(3)) == 0.0
    s = coherent([1.0, -0.5j, 0.2 + 0.3j])
    assert ob.total_photon(s) == pytest.approx(np.sum(s.d**2) / 2, abs=1e-14)
    r, a = 0.7, 1.1 - 0.4j
    assert ob.total_photon(squeezed(r, 1.0, a)) == pytest.approx(np.sinh(r) ** 2 + abs(a) ** 2,
                                                                 abs=1e-13)


def test_displacement_intensity():
    assert ob.displacement_intensity(coherent([0, 2j]), 1) == pytest.approx(4.0, abs=1e-14)
    assert ob.displacement_intensity(squeezed(1.2), 0) == 0.0


def test_quadratic_vacuum_off_diagonal():
    assert ob.quadratic_expectation(ps.vacuum(3), 0, 2) == 0


def test_quadratic_product_coherent_against_fock():
    alphas = np.array([0.6 - 0.2j, -0.3 + 0.5j])
    s = coherent(alphas)
    params = QsvaParams(alphas, np.zeros(2), np.zeros(2), np.zeros(4))
    v = fo.oracle_prepare(params, cutoff=20)
    for j in range(2):
        for k in range(2):
            expect = np.conj(alphas[j]) * alphas[k]
            assert ob.quadratic_expectation(s, j, k) == pytest.approx(expect, abs=1e-12)
            assert fo.oracle_quadratic(v, j, k) == pytest.approx(expect, abs=1e-10)


@given(seeds, st.integers(1, 3))
def test_quadratic_hermitian_with_mean_photon_diagonal(seed, n):
    s = random_state(n, rng_for(seed))
    C = ob.correlation_matrix(s)
    assert np.max(np.abs(C - C.conj().T)) <= 1e-12
    for j in range(n):
        assert abs(ob.quadratic_expectation(s, j, j) - ob.mean_photon(s, j)) <= 1e-12
        for k in range(n):
            assert ob.quadratic_expectation(s, j, k) == pytest.approx(C[j, k], abs=1e-14)


def test_second_order_forms_match_chi_derivatives():
    rng = rng_for(7)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        s = random_state(n, rng)
        for j in range(n):
            for k in range(n):
                worst = max(worst, abs(chi_quadratic(s, j, k) - ob.quadratic_expectation(s, j, k)))
    assert worst <= 1e-6


def test_quartic_matches_chi_derivatives():
    rng = rng_for(8)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        s = random_state(n, rng)
        for j in range(n):
            worst = max(worst, abs(chi_quartic(s, j) - ob.quartic_expectation(s, j)))
    assert worst <= 1e-4


def test_quartic_coherent_and_vacuum():
    a = 1.3 + 0.4j
    assert ob.quartic_expectation(coherent([a]), 0) == pytest.approx(abs(a) ** 4, rel=1e-13)
    assert ob.quartic_expectation(ps.vacuum(1), 0) == pytest.approx(0.0, abs=1e-15)


def test_quartic_squeezed_vacuum_310():
    r = np.arcsinh(np.sqrt(10.0))
    assert ob.quartic_expectation(squeezed(r), 0) == pytest.approx(310.0, abs=1e-9)


@pytest.mark.parametrize("r", [0.3, 0.6, 0.75])
def test_quartic_squeezed_vacuum_against_fock(r):
    # the formula 3s^2 + s, checked in a truncated number basis
    s = np.sinh(r) ** 2
    params = QsvaParams([0], [r], [0.8], [0])
    v = fo.oracle_prepare(params, cutoff=64)
    assert fo.oracle_quartic(v, 0) == pytest.approx(3 * s**2 + s, abs=1e-8)
    assert ob.quartic_expectation(squeezed(r, 0.8), 0) == pytest.approx(3 * s**2 + s, abs=1e-12)


def test_hamiltonian_examples():
    h1 = ob.LatticeHamiltonian.chain(1, -1.0)
    assert ob.hamiltonian_expectation(ps.vacuum(1), h1) == pytest.approx(0.0, abs=1e-15)
    assert ob.hamiltonian_expectation(coherent([np.sqrt(10.0)]), h1) == pytest.approx(-50.0,
                                                                                      abs=1e-10)
    r = np.arcsinh(np.sqrt(10.0))
    assert ob.hamiltonian_expectation(squeezed(r), h1) == pytest.approx(-155.0, abs=1e-8)


def test_hamiltonian_dimension_mismatch():
    with pytest.raises(ob.InvalidDimension):
        ob.hamiltonian_expectation(ps.vacuum(2), ob.LatticeHamiltonian.chain(3, -1.0))


def test_interaction_vanishes_without_gamma(rng):
    s = random_state(3, rng)
    assert ob.interaction_expectation(s, 0.0) == 0.0
    h = ob.LatticeHamiltonian.chain(3, 0.0)
    assert ob.hamiltonian_expectation(s, h) == ob.kinetic_expectation(s, h.omega)


def test_complex_hopping_kinetic_term(rng):
    s = random_state(2, rng)
    omega = np.array([[0.3, 0.5 - 0.7j], [0.5 + 0.7j, -0.2]])
    C = np.array([[ob.quadratic_expectation(s, j, k) for k in range(2)] for j in range(2)])
    expect = np.sum(omega * C)
    assert abs(expect.imag) < 1e-12
    h = ob.LatticeHamiltonian(2, 0.0, omega)
    assert ob.hamiltonian_expectation(s, h) == pytest.approx(expect.real, abs=1e-12)


@given(seeds, st.integers(2, 5))
def test_hamiltonian_relabeling_symmetry(seed, n):
    rng = rng_for(seed)
    s = random_state(n, rng)
    perm = rng.permutation(n)
    P = np.eye(n)[perm]
    moved = ps.apply(s, gates.interferometer_gate(P))
    omega = rng.normal(size=(n, n))
    omega = omega + omega.T
    h = ob.LatticeHamiltonian(n, rng.uniform(-1, 1), omega)
    h_moved = ob.LatticeHamiltonian(n, h.gamma, P @ omega @ P.T)
    a = ob.hamiltonian_expectation(s, h)
    b = ob.hamiltonian_expectation(moved, h_moved)
    assert a == pytest.approx(b, abs=1e-10 * max(1.0, abs(a)))


@given(seeds, st.integers(1, 3))
def test_observables_are_physical(seed, n):
    s = random_state(n, rng_for(seed))
    assert np.all(ob.photon_numbers(s) >= -1e-10)
    assert np.all(ob.quartic_all(s) >= -1e-9)


def _numeric_state_grad(f, s, eps=1e-6):
    G = np.zeros_like(s.g)
    D = np.zeros_like(s.d)
    for a in range(s.dim):
        for b in range(s.dim):
            E = np.zeros_like(s.g)
            E[a, b] = eps
            G[a, b] = (f(s.g + E, s.d) - f(s.g - E, s.d)) / (2 * eps)
        e = np.zeros_like(s.d)
        e[a] = eps
        D[a] = (f(s.g, s.d + e) - f(s.g, s.d - e)) / (2 * eps)
    return G, D


def test_state_gradients_match_finite_differences(rng):
    s = random_state(3, rng)
    h = ob.LatticeHamiltonian.chain(3, -0.7)

    def raw(fn):
        # evaluate on unsymmetrized g so every entry is an independent variable
        def f(g, d):
            t = object.__new__(ps.GaussianState)
            object.__setattr__(t, "n_modes", 3)
            object.__setattr__(t, "g", g)
            object.__setattr__(t, "d", d)
            return fn(t)
        return f

    cases = [(lambda t: ob.hamiltonian_expectation(t, h), ob.hamiltonian_grad(s, h)),
             (ob.total_photon, ob.total_photon_grad(s)),
             (lambda t: ob.mean_photon(t, 1), ob.photon_number_grad(s, 1))]
    for fn, (G, D) in cases:
        Gn, Dn = _numeric_state_grad(raw(fn), s)
        # only the symmetric part of dF/dg is meaningful
        assert np.allclose(G + G.T, Gn + Gn.T, atol=1e-7)
        assert np.allclose(D, Dn, atol=1e-7)


def test_site_profile_csv():
    text = ob.site_profile_csv(coherent([1.0, 0.0]))
    lines = text.strip().split("\n")
    assert lines[0] == "site,mean_photon,displacement_intensity"
    site, n0, i0 = lines[1].split(",")
    assert site == "0" and float(n0) == pytest.approx(1.0) and float(i0) == pytest.approx(1.0)
    assert len(lines) == 3


def test_passive_gate_conserves_total_photon(rng):
    s = random_state(4, rng)
    U = unitary_from_params(rng.normal(size=16))
    moved = ps.apply(s, gates.interferometer_gate(U))
    assert ob.total_photon(moved) == pytest.approx(ob.total_photon(s), abs=1e-9)
