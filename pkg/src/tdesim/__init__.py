"""Exact simulation of entanglement between clock cycles.

The model treats each (site, cycle) pair as its own tensor factor, so a
time-dilated qubit is literally a relabeled slot.  The package provides
the register algebra, the two-copy expansions, the resulting nonlinear
qubit channel in closed form, entropy and distance analytics, end-to-end
scenario runners, and a small circuit language with a command line.
"""

from .errors import (
    CircuitExecutionError,
    CircuitParseError,
    CycleMisalignmentError,
    InvariantViolationError,
    OverlappingSlotError,
    SimulationError,
    UnknownSlotError,
    ZeroProbabilityError,
)
from .registers import (
    BasisLevel,
    DensityOperator,
    PureState,
    Register,
    SlotId,
    basis_index,
    basis_state,
    bell_phi_plus,
    density_from_json,
    density_to_json,
    level_index,
    maximally_mixed,
    partial_trace,
    permute_slots,
    qubit_state,
    relabel_cycles,
    tensor,
    to_density,
    vacuum_state,
)
from .dynamics import (
    CorrelationMode,
    ExpansionPolicy,
    Gate,
    MeasurementOutcome,
    apply_gate,
    cnot,
    displaced_expansion,
    ensemble_density,
    free_expansion,
    hadamard,
    joint_outcome_distribution,
    measure_at_cycle,
    pauli_x,
    phase_gate,
    project,
    spectral_ensemble,
)
from .channel import (
    PopulationPair,
    QubitDensity,
    displaced_bell_channel,
    generalized_map,
    nonlinear_map,
    nonlinearity_witness,
)
from .analytics import (
    CurvePoint,
    amplification_points,
    binary_entropy,
    fig2_curves,
    purity,
    subadditivity_margin,
    trace_norm_distance,
    von_neumann_entropy,
)
from .scenarios import (
    CircuitReport,
    EntropyStudyReport,
    NoSignalReport,
    ProprietyReport,
    ReverseReport,
    dilation_from_round_trip,
    run_displaced_backend,
    run_entropy_study,
    run_fig1,
    run_no_signaling,
    run_proper_vs_improper,
    run_reverse,
)
from .dsl import (
    CircuitProgram,
    ExecutionReport,
    format_circuit,
    parse_circuit,
    run_program,
)
from .cli import RunConfig, execute

__version__ = "0.1.0"
