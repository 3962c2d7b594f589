"""Desk-scale numerics for how much correlation a measurement round can
push toward one receiver in a few-qubit state: entropic quantities,
variational measurement optimization, discord and assisted-entanglement
measures, and bound brackets for concentrated information and state
merging.
"""

from .errors import (
    AncillaTooLarge,
    DimensionTooLarge,
    DuplicateParty,
    InternalInvariantError,
    InvalidArgument,
    InvalidMatrix,
    InvalidPartition,
    InvalidPreset,
    LayoutMismatch,
    NotPSD,
    NotPure,
    NotRankOne,
    ObjectiveError,
    ShapeMismatch,
    StateFileError,
    ToolkitError,
    UnknownParty,
)
from .states import (
    Ensemble,
    Mstate,
    PureState,
    SystemLayout,
    load_state_file,
    merge_parties,
    partial_trace,
    partial_transpose,
    permute_parties,
    preset,
    purify,
    random_mixed_state,
    random_pure_state,
    state_from_dict,
    tensor,
)
from .info import (
    Partition,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_info,
    matrix_entropy,
    mi_continuity_bound,
    mutual_info,
    spectrum_entropy,
    trace_distance,
    uhlmann_fidelity,
    vn_entropy,
)
from .optim import (
    OptimizerConfig,
    Povm,
    UnitaryParam,
    decode_unitary,
    encode_unitary,
    haar_unitary,
    maximize,
    minimize,
    rank1_povm,
)
from .measures import (
    EdInterval,
    MeasureEstimate,
    coherent_info_lower,
    discord,
    ed_interval,
    eoa,
    eof,
    flag_state,
    kw_discord,
    log_negativity,
    measure_ensemble,
    one_way_ci,
    povm_flag_mutual_info,
    regularized_eoa,
)
from .ci import (
    AdditivityCheck,
    CiReport,
    MergeOutcome,
    RegularizedBand,
    SeparationReport,
    ci_lower,
    ci_product_regularized,
    ci_pure_oneway,
    ci_pure_regularized,
    ci_upper,
    dilated_protocol_state,
    discord_additivity_check,
    discord_via_ci,
    family15_separation_report,
    family15_two_round_merge,
    lqsm_fidelity_lower,
    merge_conditional_entropy_check,
    monotone_necessary_check,
    oneway_ci_upper,
    resolve_tripartite,
)
from .suites import CheckResult, SUITES, run_suites

__version__ = "0.1.0"

__all__ = [
    "AdditivityCheck",
    "AncillaTooLarge",
    "CheckResult",
    "CiReport",
    "DimensionTooLarge",
    "DuplicateParty",
    "EdInterval",
    "Ensemble",
    "InternalInvariantError",
    "InvalidArgument",
    "InvalidMatrix",
    "InvalidPartition",
    "InvalidPreset",
    "LayoutMismatch",
    "MeasureEstimate",
    "MergeOutcome",
    "Mstate",
    "NotPSD",
    "NotPure",
    "NotRankOne",
    "ObjectiveError",
    "OptimizerConfig",
    "Partition",
    "Povm",
    "PureState",
    "RegularizedBand",
    "SUITES",
    "SeparationReport",
    "ShapeMismatch",
    "StateFileError",
    "SystemLayout",
    "ToolkitError",
    "UnitaryParam",
    "UnknownParty",
    "binary_entropy",
    "ci_lower",
    "ci_product_regularized",
    "ci_pure_oneway",
    "ci_pure_regularized",
    "ci_upper",
    "coherent_info_lower",
    "conditional_entropy",
    "conditional_mutual_info",
    "decode_unitary",
    "dilated_protocol_state",
    "discord",
    "discord_additivity_check",
    "discord_via_ci",
    "ed_interval",
    "encode_unitary",
    "eoa",
    "eof",
    "family15_separation_report",
    "family15_two_round_merge",
    "flag_state",
    "haar_unitary",
    "kw_discord",
    "load_state_file",
    "log_negativity",
    "lqsm_fidelity_lower",
    "matrix_entropy",
    "maximize",
    "measure_ensemble",
    "merge_conditional_entropy_check",
    "merge_parties",
    "mi_continuity_bound",
    "minimize",
    "monotone_necessary_check",
    "mutual_info",
    "one_way_ci",
    "oneway_ci_upper",
    "partial_trace",
    "partial_transpose",
    "permute_parties",
    "povm_flag_mutual_info",
    "preset",
    "purify",
    "random_mixed_state",
    "random_pure_state",
    "rank1_povm",
    "regularized_eoa",
    "resolve_tripartite",
    "run_suites",
    "spectrum_entropy",
    "state_from_dict",
    "tensor",
    "trace_distance",
    "uhlmann_fidelity",
    "vn_entropy",
]
