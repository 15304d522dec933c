"""
popaug: min-cost popular matchings and min-cost popular augmentation

Preference instances with ties, capacities and costs; the rank-1
decomposition; min-cost popular matching; length-2 and exact augmentation;
brute-force oracles and the 1-in-3 SAT gadgets behind the hardness results.
"""

from .augment import (
    AugmentationPlan,
    AugmentationStep,
    AugmentPreconditionError,
    apply_plan,
    augment_length2,
    exact_augmentation,
    verify_plan,
)
from .config import (
    DEFAULT_ORACLE_LIMITS,
    DEFAULT_SAT_LIMITS,
    DEFAULT_SEARCH_LIMITS,
    GuardExceededError,
    OracleLimits,
    PopaugError,
    SatLimits,
    SearchLimits,
)
from .decomposition import (
    FsSets,
    GeLabels,
    Label,
    NotMaximumMatchingError,
    decompose,
    fs_sets,
    gallai_edmonds,
    max_matching_rank1,
    reduced_graph,
)
from .instance import (
    CopyVector,
    Instance,
    InstanceError,
    InvalidMatchingError,
    Item,
    LastResortError,
    Matching,
    ParseError,
    add_last_resorts,
    build_instance,
    ensure_last_resorts,
    matching_cost,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
    strip_last_resorts,
    validate_matching,
)
from .popmatch import (
    CostOverflowError,
    SolveReport,
    compare,
    is_popular,
    min_cost_max_card_popular,
    min_cost_popular,
)
from .reductions import (
    Gadget,
    GadgetKind,
    ReductionError,
    SatFormatError,
    SatInstance,
    UnsatisfyingAssignmentError,
    assignment_to_plan,
    gen_augmentation,
    gen_inapprox,
    gen_perfect_aug,
    gen_popular_instance,
    parse_sat,
    solve_1in3,
)

__all__ = [
    "AugmentPreconditionError",
    "AugmentationPlan",
    "AugmentationStep",
    "CopyVector",
    "CostOverflowError",
    "DEFAULT_ORACLE_LIMITS",
    "DEFAULT_SAT_LIMITS",
    "DEFAULT_SEARCH_LIMITS",
    "FsSets",
    "Gadget",
    "GadgetKind",
    "GeLabels",
    "GuardExceededError",
    "Instance",
    "InstanceError",
    "InvalidMatchingError",
    "Item",
    "Label",
    "LastResortError",
    "Matching",
    "NotMaximumMatchingError",
    "OracleLimits",
    "ParseError",
    "PopaugError",
    "ReductionError",
    "SatFormatError",
    "SatInstance",
    "SatLimits",
    "SearchLimits",
    "SolveReport",
    "UnsatisfyingAssignmentError",
    "add_last_resorts",
    "apply_plan",
    "assignment_to_plan",
    "augment_length2",
    "build_instance",
    "compare",
    "decompose",
    "ensure_last_resorts",
    "exact_augmentation",
    "fs_sets",
    "gallai_edmonds",
    "gen_augmentation",
    "gen_inapprox",
    "gen_perfect_aug",
    "gen_popular_instance",
    "is_popular",
    "matching_cost",
    "max_matching_rank1",
    "min_cost_max_card_popular",
    "min_cost_popular",
    "parse_instance",
    "parse_matching",
    "parse_sat",
    "reduced_graph",
    "serialize_instance",
    "serialize_matching",
    "solve_1in3",
    "strip_last_resorts",
    "validate_matching",
    "verify_plan",
]
