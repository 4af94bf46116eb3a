"""Compressed simulation of free-fermion models.

Exponentially large quadratic fermionic systems are represented in a
logarithmic number of qubits through their covariance matrices.  The
package builds the models, compiles the compressed state-preparation,
ansatz and measurement circuits, plans O(log n) commuting measurement
groups for nearest-neighbour models, and cross-validates everything
against two independent classical oracles.
"""

from . import circuits, cli, gaussian, models, pauli, planner, simulator, sogroup, vqe
from .circuits import Circuit, Gate, compile_ansatz, diagonalizer, prep_purified_vacuum
from .gaussian import (ENERGY_CONSTANT, compressed_density, energy_from_covariance,
                       rotate_covariance, spectral_ground_energy, vacuum_covariance)
from .models import (ModelSpec, QuadraticHamiltonian, build_model,
                     brute_force_ground_energy, kitaev_wire, tight_binding_1d,
                     tight_binding_2d, transverse_ising)
from .pauli import (AxisPattern, CommutingSet, PauliWord, commutes,
                    enumerate_commuting_sets, set_of_element, support_of_set)
from .planner import MeasurementPlan, build_plan, estimate_energy, estimate_entries
from .simulator import ShotCounts, circuit_unitary, run, sample, system_probabilities
from .sogroup import GivensRotation, RotationPlan, compose_rotation, givens_matrix
from .vqe import (ObjectiveConfig, OptimizationResult, build_restricted_ansatz,
                  evaluate_objective, optimize)

__version__ = "0.1.0"
