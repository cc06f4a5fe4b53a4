#!/usr/bin/env python3
# Compare the closed-form phase-space results with a brute-force Fock-space
# simulation of the same circuit.

import numpy as np

from solitonlab import ansatz, fock_oracle as fo, observables as ob, sampling
from solitonlab.validate import random_circuit

rng = np.random.default_rng(7)
params = random_circuit(2, rng)
state = ansatz.prepare_state(params)
h = ob.LatticeHamiltonian.chain(2, -1.0)

# a cutoff of 20 is refused outright because too much weight leaks past it
for cutoff in (30, 40, 56):
    v = fo.oracle_prepare(params, cutoff)
    err = abs(fo.oracle_expectation(v, h) - ob.hamiltonian_expectation(state, h))
    print(f"cutoff {cutoff:>2}: leakage {v.leakage:.1e}  |<H> error| {err:.1e}")

# pattern probabilities converge much faster than the quartic energy
v = fo.oracle_prepare(params, 40)
for counts in [(0, 0), (1, 0), (1, 1), (2, 0), (2, 2)]:
    print(counts, f"{sampling.pattern_probability(state, counts):.10f}",
          f"{fo.oracle_pattern_probability(v, counts):.10f}")
