"""Classical vs quantum pure dephasing in repeated runs of Deutsch's algorithm."""

from .dephasing import (
    ConditionalPropagators,
    DephasingFactors,
    QubitEnvironment,
    dephasing_factors,
    dephasing_kraus,
    factor_c,
    factor_d2,
    joint_dephasing_unitary,
    phase_damping_kraus,
)
from .deutsch import (
    ALL_FUNCTIONS,
    FunctionId,
    ProbabilityTable,
    noiseless_table,
    run_cycles_joint,
    run_cycles_kraus,
    single_cycle_probs_analytic,
    table_distance,
    two_cycle_probs_classical,
    two_cycle_probs_exponential,
    two_cycle_probs_quantum,
    u_fn,
)
from .environment import (
    BathTableError,
    ExponentialModel,
    NuclearSpin,
    SpinBathSpec,
    bath_environment,
    bath_factor_series,
    bath_factors,
    dipolar_coupling,
    load_bath_file,
    load_bath_table,
    nv_bath,
    zeeman_frequency,
)
from .kernels import BACKEND
from .linalg import CapacityError, ValidationError, partial_trace, tensor
from .states import DensityMatrix, apply_kraus, apply_unitary, measure_qubit

__version__ = "0.1.0"
