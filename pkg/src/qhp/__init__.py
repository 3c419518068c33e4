"""Exact calculus on weighted dual graphs of rational-curve configurations,
P1-fibration fiber bookkeeping, boundary normal forms, and the classification
of affine- and C*-ruled rational surfaces with quotient singularities."""

from .constructions import (
    Built,
    construct,
    construct_affine,
    construct_twisted,
    construct_untwisted_c1,
    construct_untwisted_p1,
    enumerate_column_programs,
    enumerate_connected_programs,
    enumerate_models,
    minimal_affine,
    minimal_twisted,
    moduli_family,
    random_built,
    raw_untwisted_c1,
    raw_untwisted_p1,
    vanishing_column_model,
    vanishing_pair_model,
)
from .counting import (
    RulingCount,
    SingularityData,
    affine_ruling_unique,
    count_contractible,
    count_cstar_rulings,
    match_boundary_pattern,
    singularities,
    snc_minimalize,
)
from .errors import (
    DomainError,
    FormatError,
    InconsistencyError,
    NormalizationError,
    QhpError,
    StructureError,
)
from .fibers import (
    ROLE_D,
    ROLE_E,
    ROLE_S0,
    BlowupProgram,
    FiberTree,
    Sprout,
    Subdivide,
    apply_step,
    blow_down,
    columnar_split,
    contraction_trace,
    enumerate_fibers,
    is_connected_program,
    mu_s,
    new_fiber,
    replay,
    validate_fiber,
)
from .flows import (
    FlowMove,
    FlowResult,
    Reversion,
    StandardForm,
    elementary_transform,
    entry,
    flow,
    flow_equivalent,
    is_balanced,
    is_standard,
    is_strongly_balanced,
    reversion,
    to_standard_form,
)
from .graphs import (
    BranchingData,
    Chain,
    WeightedForest,
    branching_data,
    canonical_certificate,
    chain_discriminant,
    co_inductance,
    discriminant,
    edge_expansion,
    gcd_many,
    inductance,
    is_negative_definite,
    isomorphic,
    tip_coprimality,
)
from .jsonio import (
    chain_from_json,
    fiber_from_json,
    fiber_to_json,
    forest_from_json,
    forest_to_json,
    kod_from_json,
    kod_to_json,
    model_from_json,
    model_to_json,
    program_from_json,
    program_to_json,
    rational_from_json,
    rational_to_json,
    report_to_json,
    standard_form_to_json,
)
from .kodaira import KodairaData, classify_F0, k0_zero_cases, kodaira
from .models import (
    BASE_C1,
    BASE_P1,
    RULING_AFFINE,
    RULING_CSTAR,
    CriterionVerdict,
    HomologyData,
    RulingModel,
    SigmaSummary,
    StructuralVerdict,
    assemble_boundary,
    dD_structural,
    h1,
    p_minimality_violations,
    qhp_criterion,
    role_part,
    sigma_and_fujita,
    sigma_of_fiber,
    vertex_tag,
)
from .report import ClassificationReport, boundary_shape, classify

__all__ = [name for name in dir() if not name.startswith("_")]
