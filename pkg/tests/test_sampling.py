import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state, rng_for
from solitonlab import fock_oracle as fo
from solitonlab import gates
from solitonlab import phase_space as ps
from solitonlab import sampling
from solitonlab.ansatz import QsvaParams, prepare_state
from solitonlab.observables import total_photon
from solitonlab.validate import random_circuit

seeds = st.integers(0, 2**32 - 1)


def patterns(n, max_total):
    for counts in itertools.product(range(max_total + 1), repeat=n):
        if sum(counts) <= max_total:
            yield counts


def test_vacuum_empty_pattern():
    assert sampling.pattern_probability(ps.vacuum(3), (0, 0, 0)) == pytest.approx(1.0, abs=1e-15)


def test_vacuum_pair_scan_is_zero():
    for total in (2, 4):
        assert np.array_equal(sampling.pair_probability_scan(ps.vacuum(4), total),
                              np.zeros((4, 4)))


@pytest.mark.parametrize("alpha", [0.5, 1.0 - 0.7j, 1.5j])
def test_coherent_state_is_poissonian(alpha):
    s = ps.apply(ps.vacuum(1), gates.displacement_gate([alpha]))
    m = abs(alpha) ** 2
    for k in range(7):
        expect = math.exp(-m) * m**k / math.factorial(k)
        assert sampling.pattern_probability(s, (k,)) == pytest.approx(expect, abs=1e-13)


def test_coherent_state_against_fock_oracle():
    alpha = 0.9 - 0.4j
    s = ps.apply(ps.vacuum(1), gates.displacement_gate([alpha]))
    v = fo.oracle_prepare(QsvaParams([alpha], [0], [0], [0]), cutoff=30)
    for k in range(6):
        assert sampling.pattern_probability(s, (k,)) == pytest.approx(
            fo.oracle_pattern_probability(v, (k,)), abs=1e-12)


def test_matches_fock_oracle_on_random_circuits():
    rng = rng_for(11)
    worst = 0.0
    for i in range(6):
        n = 2 + i % 2
        p = random_circuit(n, rng)
        s = prepare_state(p)
        v = fo.oracle_prepare(p, cutoff=40)
        for counts in patterns(n, 4):
            worst = max(worst, abs(sampling.pattern_probability(s, counts)
                                   - fo.oracle_pattern_probability(v, counts)))
    assert worst <= 1e-6


def test_squeezed_vacuum_only_even_counts():
    s = ps.apply(ps.vacuum(1), gates.squeeze_gate(1, 0, 0.6, 0.9))
    for k in (1, 3, 5):
        assert sampling.pattern_probability(s, (k,)) == pytest.approx(0.0, abs=1e-15)
    t = np.tanh(0.6)
    assert sampling.pattern_probability(s, (2,)) == pytest.approx(t**2 / 2 / np.cosh(0.6),
                                                                 abs=1e-13)


def test_two_mode_squeezed_pairs_only():
    r = 0.5
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    Z = np.diag([1.0, -1.0])
    g = np.block([[ch * np.eye(2), sh * Z], [sh * Z, ch * np.eye(2)]])
    s = ps.GaussianState(2, g, np.zeros(4))
    t = np.tanh(r)
    for j, k in patterns(2, 6):
        p = sampling.pattern_probability(s, (j, k))
        expect = t ** (2 * j) / np.cosh(r) ** 2 if j == k else 0.0
        assert p == pytest.approx(expect, abs=1e-13)


def test_probabilities_sum_towards_one():
    rng = rng_for(3)
    checked = 0
    while checked < 5:
        n = int(rng.integers(1, 4))
        s = random_state(n, rng, alpha_max=0.5, r_max=0.4)
        if total_photon(s) > 0.5:
            continue
        total = sum(sampling.pattern_probability(s, sampling.PhotonPattern(c, budget=8))
                    for c in patterns(n, 8))
        assert total <= 1.0 + 1e-12
        assert 1.0 - total < 1e-3
        checked += 1


@given(seeds, st.integers(2, 4))
def test_permutation_equivariance(seed, n):
    rng = rng_for(seed)
    s = random_state(n, rng)
    perm = rng.permutation(n)
    P = np.eye(n)[perm]
    moved = ps.apply(s, gates.interferometer_gate(P))
    # mode j of the original ends up at the row of P holding a 1 in column j
    dest = np.argmax(P, axis=0)
    for counts in patterns(n, 3):
        moved_counts = [0] * n
        for j, c in enumerate(counts):
            moved_counts[dest[j]] = c
        assert sampling.pattern_probability(moved, moved_counts) == pytest.approx(
            sampling.pattern_probability(s, counts), abs=1e-12)


@given(seeds, st.integers(1, 3))
def test_probabilities_lie_in_unit_interval(seed, n):
    s = random_state(n, rng_for(seed), r_max=1.2, alpha_max=2.0)
    for counts in patterns(n, 4):
        p = sampling.pattern_probability(s, counts)
        assert 0.0 <= p <= 1.0


def test_pattern_budget_and_validation():
    with pytest.raises(sampling.PatternBudgetExceeded):
        sampling.PhotonPattern((4, 3))
    assert sampling.PhotonPattern((4, 3), budget=7).total == 7
    with pytest.raises(ValueError):
        sampling.PhotonPattern((-1, 0))
    with pytest.raises(ValueError):
        sampling.pattern_probability(ps.vacuum(2), (1, 0, 0))


def test_pair_scan_symmetric_and_valid(rng):
    s = random_state(4, rng)
    for total in (2, 4):
        scan = sampling.pair_probability_scan(s, total)
        assert np.array_equal(scan, scan.T)
        assert np.all((scan >= 0) & (scan <= 1))
    assert scan[1, 3] == pytest.approx(sampling.pattern_probability(s, (0, 2, 0, 2)))
    assert scan[2, 2] == pytest.approx(sampling.pattern_probability(s, (0, 0, 4, 0)))


def test_pair_scan_rejects_odd_total():
    with pytest.raises(ValueError):
        sampling.pair_probability_scan(ps.vacuum(2), 3)


def test_pair_scan_csv():
    text = sampling.pair_scan_csv(np.array([[0.1, 0.2], [0.2, 0.3]]))
    lines = text.strip().split("\n")
    assert lines[0] == "site_a,site_b,probability"
    assert lines[2] == "0,1,0.2"
    assert len(lines) == 5
