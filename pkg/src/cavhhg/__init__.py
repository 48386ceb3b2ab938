"""Driven matter in a quantized cavity: grid and polaritonic-basis propagation
with high-harmonic spectrum analysis."""

from .model import CavitySpec, PulseSpec, coupling_from_volume, pulse_amplitude
from .grid import CapSpec, GridHamiltonian, GridSpec, GridState, SoftCoreModel, \
    build_potentials, cavity_grid_parameters, grid_observables, \
    imaginary_time_ground_state, propagate_rk4, solve_stationary_electronic
from .polariton import CisDetail, ElectronicData, PolaritonBasis, \
    assemble_pauli_fierz, build_polariton_basis, diagonalize, \
    ionization_rates_cis, ionization_rates_polariton, transform_dipole, \
    zero_order_decomposition
from .tdci import CoefficientState, PropagatorSetup, population_report, \
    run_driven, split_step
from .hhg import CutoffFit, SpectrumRecord, dipole_acceleration, fit_cutoff, \
    hhg_spectrum, phase_portrait, smooth_average, spectrum_from_trajectory
from .records import TrajectoryRecord
from .units import ATOMIC_UNITS, AtomicUnits

__version__ = "0.1.0"
