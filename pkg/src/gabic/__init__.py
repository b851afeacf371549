"""Two directly coupled giant atoms on a coupled-resonator waveguide.

The package computes the phase-controlled bound states in the continuum
of the model, the Markovian 2x2 effective spectrum, exact full-lattice
single-excitation dynamics, bound-state photon/atom profiles and
two-atom entanglement, plus a CLI that emits the corresponding data
files.
"""
from .model import (ConfigurationError, Geometry, ModelParams, dispersion,
                    gamma, sites_for_time, validate)
from .markov import (EffectiveMatrix, EigenPair2, PhaseSweepRecord,
                     build_effective_matrix, count_bics, eigen2, evolve_markov,
                     i_power, i_power_kernel, sweep_phase)
from .lattice import (LatticeHamiltonian, LightConeWarning, NumericalError,
                      SingleExcitationState, SpectrumResult, Trajectory,
                      assemble_hamiltonian, atom_excited, diagonalize,
                      propagate, rhs_amplitude_equations, rk4_propagate)
from .analysis import (BicCriteria, BicProfile, EnergyCheck, bic_energy_check,
                       concurrence, find_bics, photon_profile, reduce_to_atoms,
                       validate_density_matrix)

__version__ = "0.1.0"

__all__ = [
    "BicCriteria", "BicProfile", "ConfigurationError", "EffectiveMatrix",
    "EigenPair2", "EnergyCheck", "Geometry", "LatticeHamiltonian",
    "LightConeWarning", "ModelParams", "NumericalError", "PhaseSweepRecord",
    "SingleExcitationState", "SpectrumResult", "Trajectory",
    "assemble_hamiltonian", "atom_excited", "bic_energy_check",
    "build_effective_matrix", "concurrence", "count_bics", "diagonalize",
    "dispersion", "eigen2", "evolve_markov", "find_bics", "gamma", "i_power",
    "i_power_kernel", "photon_profile", "propagate", "reduce_to_atoms",
    "rhs_amplitude_equations", "rk4_propagate", "sites_for_time",
    "sweep_phase", "validate", "validate_density_matrix",
]
