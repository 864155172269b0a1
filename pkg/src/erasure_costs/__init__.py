"""Erasure costs against thermal and conserved-quantity (spin) reservoirs."""

__version__ = "0.1.0"

from .bounds import (VariableSpec, hamming_cost_bound, multi_cost_total, optimality_identity,
                     reservoir_entropy, variable_cost_bound)
from .ensemble import (EnsembleStats, FieldModel, RngSpec, residual_field_ensemble,
                       sample_erasure_trajectory, trajectory_ensemble)
from .errors import (ChainTooLong, DomainError, InfeasibleTarget, NoConvergence,
                     NonpositiveTemperature, StopRuleUnreachable, ToleranceNotMet)
from .finite_bath import append_ancilla, exchange_step, init_joint, simulate_finite
from .maxent_core import (ObservableTable, MaxEntState, entropy_differential, erasure_balance,
                          solve_multipliers, state_entropy)
from .protocol import (ProtocolConfig, combined_scaled_cost, cost_bounds, cost_series,
                       equilibrium_after_m, run_erasure)
from .reservoirs import (SpinBathParams, ThermalMemory, alpha_from_gamma, bath_distribution,
                         distribution_equivalence, gamma_from_alpha, kT_from_alpha,
                         landauer_work, memory_equilibrium)
