from .deterministic import (
    gen_det_demand_lower,
    gen_fifo_extension,
    gen_fifo_pair,
    gen_fwf_pair,
    gen_opt_pair,
)
from .pairs import SequencePair, read_pairs_jsonl, write_pairs_jsonl
from .randomized import (
    gen_eoa_pair,
    gen_mark_pair,
    gen_partition_equitable_pair,
    gen_random_pair,
    gen_randomized_demand_lower,
    gen_smoothed_lru_pair,
    mark_phase_costs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
