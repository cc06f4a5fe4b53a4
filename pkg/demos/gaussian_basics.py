#!/usr/bin/env python3
# Walk through the phase-space toolkit: build a few Gaussian states,
# push them through gates and read off photon statistics.

import numpy as np

from solitonlab import gates, observables as ob, phase_space as ps

# vacuum on three modes: identity covariance, zero displacement
state = ps.vacuum(3)
print("vacuum covariance diagonal:", np.diag(state.g))

# displace mode 0 and squeeze mode 2
state = ps.apply(state, gates.displacement_gate([1.0 + 0.5j, 0, 0]))
state = ps.apply(state, gates.squeeze_gate(3, 2, 0.6, 0.0))
print("photon numbers:", np.round(ob.photon_numbers(state), 6))
print("expected:", np.round([abs(1 + 0.5j) ** 2, 0.0, np.sinh(0.6) ** 2], 6))

# a 50:50 beam splitter between modes 0 and 1 shares the coherent photons
bs = np.eye(3, dtype=complex)
bs[:2, :2] = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
mixed = ps.apply(state, gates.interferometer_gate(bs))
print("after beam splitter:", np.round(ob.photon_numbers(mixed), 6))

# every gate is an affine symplectic map; their composition is too
chain = ps.compose_all([gates.squeeze_gate(3, 0, 0.3, 1.0), gates.interferometer_gate(bs)])
print("symplectic error of the composition:", ps.symplectic_error(chain.M))

# one-site energies: a coherent state with ten photons sits at -50, while a
# squeezed vacuum with the same photon number reaches -155
h1 = ob.LatticeHamiltonian.chain(1, -1.0)
coherent = ps.apply(ps.vacuum(1), gates.displacement_gate([np.sqrt(10)]))
squeezed = ps.apply(ps.vacuum(1), gates.squeeze_gate(1, 0, np.arcsinh(np.sqrt(10)), 0.0))
for name, s in (("coherent", coherent), ("squeezed", squeezed)):
    print(f"{name:>9}: N = {ob.total_photon(s):.6f}  "
          f"<a^dag^2 a^2> = {ob.quartic_expectation(s, 0):.6f}  "
          f"<H> = {ob.hamiltonian_expectation(s, h1):.6f}")

# the characteristic function is bounded by one and equals one at the origin
x = np.random.default_rng(0).normal(size=6)
print("|chi(x)| =", abs(ps.char_fn(mixed, x)), " chi(0) =", ps.char_fn(mixed, np.zeros(6)))
