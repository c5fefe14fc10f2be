"""Ohmic-bath effects on quantum annealing Hamiltonians via poor man's scaling."""

from .channels import (
    dephase_all,
    dephase_qubit,
    ghz_offdiagonal_factor,
    pauli_scale_state,
    pure_density,
    shared_bath_state_step,
    validate_density_matrix,
)
from .flow import (
    BathSpec,
    FlowResult,
    FullyLocalized,
    bath_exponent,
    flow_closed_form,
    flow_ode,
    shared_bath_zz,
    stopping_frequency,
    transform_observable,
)
from .metrics import MetricsRecord, entropy, fidelity_pure_mixed, purity, trace_distance
from .models import AFMInstance, afm_hamiltonian, ghz_state, random_afm_instance, single_spin_boson
from .pauli import (
    PauliAxis,
    PauliOperator,
    PauliString,
    anticommuting_support,
    coefficient_norm,
    from_dense,
    to_dense,
)
from .spectral import GroundState, ground_state, spectrum
from .sweep import SweepConfig, SweepRecord, classify_regime, run_point, run_sweep

__version__ = "0.1.0"
