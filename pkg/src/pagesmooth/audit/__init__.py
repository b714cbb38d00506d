from .lru_random import (
    DistanceTable,
    EditCase,
    conjecture_probe,
    edit_cases,
    lru_random_distance_fixpoint,
    lru_random_edit_bound,
    transport,
)
from .smoothness import (
    POLICY_TAGS,
    BoundSpec,
    SmoothnessReport,
    audit_policy,
    check_competitive,
    composition_check,
    exhaustive_smoothness,
    format_report,
    make_evaluator,
    table_bound,
    verify_witness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
