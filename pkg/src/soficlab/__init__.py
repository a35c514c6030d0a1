"""soficlab: invariants, embedding decisions and cover constructions for sofic shifts."""

__version__ = "0.1.0"

from .census import census, cover_census, entropy, is_receptive, periodic_point_count, sft_qn_oracle
from .core import CoverSpec, LabeledGraph, ShiftHandle, load_graph_file, parse_presentation
from .decide import (DECIDERS, decide_ai_factorizable, decide_embed_irreducible_sft,
                     decide_embed_through_cover, decide_factorizable, decide_s_factorizable)
from .errors import SoficError
from .forge import (ai_sft_cover, enlarge_with_orbit, extract_injective_sub, forge_ai_cover,
                    forge_receptive_cover, grow_periodic_support)
from .period import is_p_periodic, period_of
from .presentation import fischer_cover, left_fischer_cover, shifts_equal
from .structure import component_tree, derived_shift
from .verdict import Verdict3

__all__ = [
    "__version__", "LabeledGraph", "ShiftHandle", "CoverSpec", "parse_presentation",
    "load_graph_file", "fischer_cover", "left_fischer_cover", "shifts_equal", "census",
    "cover_census", "entropy", "is_receptive", "periodic_point_count", "sft_qn_oracle",
    "period_of", "is_p_periodic", "derived_shift", "component_tree", "DECIDERS",
    "decide_embed_irreducible_sft", "decide_embed_through_cover", "decide_s_factorizable",
    "decide_factorizable", "decide_ai_factorizable", "forge_receptive_cover", "forge_ai_cover",
    "ai_sft_cover", "extract_injective_sub", "enlarge_with_orbit", "grow_periodic_support",
    "Verdict3", "SoficError",
]
