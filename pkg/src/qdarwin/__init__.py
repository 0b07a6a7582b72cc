"""Density-matrix simulation of pointer-state decoherence with
environment-fragment information analysis."""

from .analysis import (
    CatalogueRow,
    CorrelationProbeReport,
    LimitFormReport,
    PipRow,
    PipTable,
    RedundancyReport,
    catalogue_zurek,
    ideal_correlation_probe,
    limit_form_check,
    mutual_information,
    pip,
    plateau_condition,
    redundancy,
    symmetry_partitioned_state,
    symmetry_sweep,
)
from .attractor import (
    AttractorBasis,
    Parity,
    Regime,
    SymmetryStates,
    analytic_basis_max,
    analytic_basis_min,
    analytic_output_state,
    asymptotic_project,
    dimension_formula,
    numeric_attractor_basis,
    project_asymptotic_max,
    project_asymptotic_min,
)
from .channels import (
    ChannelSpec,
    channel_step,
    controlled_u,
    iterate_channel,
    single_u,
    zurek_evolve,
)
from .digraph import (
    DigraphClass,
    DigraphKind,
    InteractionDigraph,
    classify,
    complete_env,
    koenig,
    with_env_bindings,
)
from .errors import (
    DecompositionError,
    NumericalError,
    PSDViolationError,
    QDarwinError,
    RankConditioningWarning,
    ValidationError,
)
from .inputs import (
    InputStateSpec,
    MaximallyMixed,
    MixtureOfRegistries,
    Registry,
    SuperpositionOfRegistries,
    SymmetryEntangled,
    build_input_state,
)
from .qstate import (
    DensityMatrix,
    RegisterLayout,
    StateVector,
    basis_density,
    hs_inner_product,
    maximally_mixed,
    partial_trace,
    pointer_shannon_entropy,
    pure_density,
    registry_density,
    shannon_entropy,
    spectrum,
    tensor_product,
    trace_distance,
    von_neumann_entropy,
)

__version__ = "0.1.0"
