#!/usr/bin/env python3
# Two bound solitons at sites 2 and 7 of a ten-site chain. The pair-pattern
# scan shows photon pairs only on the soliton sites.

import numpy as np

from solitonlab import ansatz, observables as ob, sampling, solver

N_SITES, SITE_A, SITE_B = 10, 2, 7

h = ob.LatticeHamiltonian.chain(N_SITES, -1.0)
for n_target in (10.0, 40.0):
    spec = solver.LossSpec("bound", n_target=n_target, site_a=SITE_A, site_b=SITE_B)
    params, history = solver.train(solver.initial_params(N_SITES, seed=0), spec, h,
                                   solver.TrainConfig(epochs=30000, history_stride=1000))
    state = ansatz.prepare_state(params)
    print(f"N_T = {n_target:g}: <H> = {history.column('mean_H')[-1]:.2f}, "
          f"E_N(site {SITE_A} | rest) = {history.column('log_negativity')[-1]:.3f}")
    print("  photons per site:", np.round(ob.photon_numbers(state), 2))

    if n_target == 10.0:
        for total in (2, 4):
            scan = sampling.pair_probability_scan(state, total)
            top = np.dstack(np.unravel_index(np.argsort(scan, axis=None)[::-1][:6], scan.shape))[0]
            print(f"  largest pair probabilities with {total // 2} photon(s) per site:")
            for a, b in top:
                if a <= b:
                    print(f"    sites ({a}, {b}): {scan[a, b]:.3e}")
