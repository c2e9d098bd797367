"""Statevector QAOA toolkit for capacity-constrained two-market scheduling."""

from .arithmetic import QuantumRegister, build_add_const, build_add_pow2, build_add_register
from .circuit import (
    Circuit,
    CircuitBuilder,
    Gate,
    ResourceReport,
    compose,
    inverse,
    multi_controlled_x,
    resources,
)
from .constrained import (
    ConstrainedEncoding,
    ConstrainedLayout,
    build_mixer,
    build_phase_separator_constrained,
    expand_ising,
    make_constrained_layout,
)
from .driver import AngleSchedule, QaoaRunResult, linear_schedule, run_qaoa, run_qaoa_oracle
from .errors import CapacityError, ValidationError
from .knapsack import (
    BatteryInstance,
    KnapsackInstance,
    ObjectiveSpec,
    brute_force_max,
    instance_from_json,
    instance_to_json,
    load_instance,
    objective,
    objective_table,
    oracle_phase,
    reconstruct_schedule,
    reduce_to_knapsack,
    save_instance,
    slack_bit_count,
    slack_coefficients,
    solve_dp,
)
from .relaxed import (
    RelaxedLayout,
    build_cost_calc,
    build_constraint_test,
    build_penalty_dephase,
    build_phase_separator_relaxed,
    build_return_phase,
    make_layout,
)
from .sim import (
    QUBIT_CAP,
    MeasurementResult,
    Statevector,
    apply,
    expectation_diagonal,
    global_phase_distance,
    marginal,
    new_uniform,
    new_zero,
    probabilities,
    sample,
    states_equal_up_to_global_phase,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
