from .analytic import (
    expected_eoa,
    expected_mark,
    expected_smoothed_lru,
    expected_step_lru,
    reuse_distances,
    smoothed_lru_ensemble,
    smoothed_lru_hit_prob,
    step_lru_ensemble,
    step_lru_hit_prob,
)
from .distributions import (
    EMPTY,
    EOAEngine,
    ExpectedMisses,
    LRURandomEngine,
    MarkEngine,
    RandomEngine,
    enumerate_eoa,
    enumerate_mark,
    expected_lru_random,
    expected_random,
    harmonic,
)
from .layers import (
    empty_layers,
    layer_trace,
    layer_update,
    layers_equal_up_to_renaming,
    make_layers,
    size_vector,
)
from .montecarlo import Estimate, monte_carlo

__all__ = [name for name in dir() if not name.startswith("_")]
