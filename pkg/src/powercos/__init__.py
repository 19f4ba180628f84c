"""Ground-state preparation by power-cosine filtering of time evolution.

A statevector toolkit built around the single-ancilla filter
(I + e^{-iH tau}) / 2: exact and Trotterized propagators, measure-and-reset
trajectory sampling, shot-noise energy estimation with a parametric gate
noise model, a cost-matched adiabatic baseline, and a reproducible
experiment CLI.
"""

from powercos.adiabatic import TaspConfig, run_tasp, transverse_field_start
from powercos.errors import (ConfigError, DegenerateStateError, FilterAbort,
                             NumericalError, PowercosError, ResonanceError,
                             ResourceLimitError)
from powercos.evolve import (TrotterConfig, controlled_evolve, exact_evolve,
                             trotter_evolve)
from powercos.filtering import (FilterConfig, FilterTrace, StepRecord,
                                degree_for_precision, detuned_survival,
                                detuning_tolerance, filter_step, mcmr_trajectory,
                                predicted_amplitude, predicted_excited_decay,
                                resonance_tau, run_filter, trajectory_streams)
from powercos.pauli import (Hamiltonian, PauliTerm, apply_term, build_heisenberg_xyz,
                            expectation, format_hamiltonian, linear_combination,
                            load_hamiltonian, parse_hamiltonian, save_hamiltonian,
                            to_dense)
from powercos.sampling import (MeasurementGroup, NoiseModel, ShotPlan,
                               noisy_filter_trajectory, plan_measurements,
                               sample_energy)
from powercos.spectral import (SpectralData, diagonalize, diagonalize_matrix,
                               ground_overlap, spectral_gap)
from powercos.state import (StateVector, attach_ancilla, drop_ancilla, fidelity_to,
                            hadamard, init_basis, inner, neel_index, project,
                            uniform_state)

__version__ = "0.1.0"
