#!/usr/bin/env python3
# Train the squeeze-displace-mix ansatz into a single lattice soliton and
# watch the energy pass the coherent plateau on its way to the squeezed
# ground state. Takes about a minute on one core.

import numpy as np

from solitonlab import ansatz, observables as ob, solver
from solitonlab.entanglement import Bipartition, log_negativity

N_SITES = 17
GAMMA = -1.0
EPOCHS = 30000

h = ob.LatticeHamiltonian.chain(N_SITES, GAMMA)
spec = solver.LossSpec(n_target=10.0)
config = solver.TrainConfig(epochs=EPOCHS, history_stride=500)

params, history = solver.train(solver.initial_params(N_SITES, seed=0), spec, h, config)

# a coarse look at the trajectory
for epoch, loss, energy, number, e_n in history.rows[::6]:
    print(f"epoch {epoch:>6}  <H> = {energy:9.3f}  N = {number:7.3f}  E_N = {e_n:.3f}")

energy = history.column("mean_H")
near = np.flatnonzero(np.abs(energy + 50) <= 5)
if near.size:
    print("passed the coherent plateau around epoch", int(history.column("epoch")[near[0]]))

state = ansatz.prepare_state(params)
profile = ob.photon_numbers(state)
peak = int(np.argmax(profile))
print("final <H>:", energy[-1])
print("photons per site:", np.round(profile, 3))
print("soliton site:", peak, " E_N across it:",
      log_negativity(state, Bipartition([peak])))
