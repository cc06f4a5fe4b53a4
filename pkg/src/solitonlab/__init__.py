"""Gaussian phase-space simulation of quantum lattice solitons."""

from .phase_space import (AffineSymplectic, GaussianState, apply, char_fn, compose,
                          compose_all, invert, numeric_moments, symplectic_form, vacuum)
from .gates import (ComplexMode, bogoliubov_gate, displacement_gate, interferometer_gate,
                    squeeze_gate)
from .observables import LatticeHamiltonian, hamiltonian_expectation, mean_photon, total_photon
from .ansatz import QsvaParams, prepare_state
from .entanglement import Bipartition, log_negativity
from .sampling import PhotonPattern, pair_probability_scan, pattern_probability
from .solver import LossSpec, TrainConfig, TrainHistory, gradient, loss, train

__version__ = "0.1.0"

__all__ = [
    "AffineSymplectic", "GaussianState", "apply", "char_fn", "compose", "compose_all",
    "invert", "numeric_moments", "symplectic_form", "vacuum", "ComplexMode",
    "bogoliubov_gate", "displacement_gate", "interferometer_gate", "squeeze_gate",
    "LatticeHamiltonian", "hamiltonian_expectation", "mean_photon", "total_photon",
    "QsvaParams", "prepare_state", "Bipartition", "log_negativity", "PhotonPattern",
    "pair_probability_scan", "pattern_probability", "LossSpec", "TrainConfig",
    "TrainHistory", "gradient", "loss", "train",
]
