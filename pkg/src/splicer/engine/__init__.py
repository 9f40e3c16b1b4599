"""Synthesis core: hole filling, reference renaming, validation and ranking."""

from .config import SpliceConfig, Stats
from .fill import (Candidate, DonorCodelets, HoleSpec, codelet_key, fill, hole_choices,
                   hole_specs, instantiate, valid)
from .merge import (Solution, UndefinedRef, Validator, merge, ref_targets, rename_codelet,
                    undefined_refs)
from .splice import (DonorResult, Precision, SpliceResult, ablation_run, aggregate,
                     complete_donor, has_dead_return, measure_precision, post_filter, splice)

__all__ = [
    "SpliceConfig", "Stats", "Candidate", "DonorCodelets", "HoleSpec", "codelet_key", "fill",
    "hole_choices", "hole_specs", "instantiate", "valid", "Solution", "UndefinedRef",
    "Validator", "merge", "ref_targets", "rename_codelet", "undefined_refs", "DonorResult",
    "Precision", "SpliceResult", "ablation_run", "aggregate", "complete_donor",
    "has_dead_return", "measure_precision", "post_filter", "splice",
]
