"""Order separation machinery for free groups and cyclic amalgams.

Everything is immutable after construction and every operation is a pure
function, so values can be shared freely across threads.
"""

from .words import (
    Basis,
    Word,
    commensurable,
    conjugate_in_free,
    cyclic_reduce,
    parse_word,
    primitive_root,
    reduce,
    word_to_text,
)
from .action_graph import (
    ActionGraph,
    CyclePath,
    FiniteQuotient,
    distance,
    element_order,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    has_l_near,
    image_perm,
    u_cycles,
    validate,
)
from .surgery import (
    EqualizeReport,
    SpliceSpec,
    equalize_orders,
    exact_order_quotient,
    find_simple_quotient,
    splice,
)
from .amalgam import (
    AmalgamPresentation,
    AmalgamWord,
    conjugate_in_amalgam,
    cyclically_reduce_amalgam,
    delta_sets,
    matched_pair,
    parse_amalgam_word,
    reduce_amalgam,
    syllable_membership,
)
from .amalgam_graph import (
    AmalgamActionGraph,
    GluingSpec,
    SeparationResult,
    amalgam_splice,
    c_near_edges,
    c_near_paths,
    coset_subgraph,
    glue_quotient,
    separate_orders,
    validate_amalgam_graph,
)
from .oracle import enumerate_free_homs, oracle_consistency, oracle_separate

__all__ = [
    "Basis",
    "Word",
    "commensurable",
    "conjugate_in_free",
    "cyclic_reduce",
    "parse_word",
    "primitive_root",
    "reduce",
    "word_to_text",
    "ActionGraph",
    "CyclePath",
    "FiniteQuotient",
    "distance",
    "element_order",
    "graph_from_json",
    "graph_to_dot",
    "graph_to_json",
    "has_l_near",
    "image_perm",
    "u_cycles",
    "validate",
    "EqualizeReport",
    "SpliceSpec",
    "equalize_orders",
    "exact_order_quotient",
    "find_simple_quotient",
    "splice",
    "AmalgamPresentation",
    "AmalgamWord",
    "conjugate_in_amalgam",
    "cyclically_reduce_amalgam",
    "delta_sets",
    "matched_pair",
    "parse_amalgam_word",
    "reduce_amalgam",
    "syllable_membership",
    "AmalgamActionGraph",
    "GluingSpec",
    "SeparationResult",
    "amalgam_splice",
    "c_near_edges",
    "c_near_paths",
    "coset_subgraph",
    "glue_quotient",
    "separate_orders",
    "validate_amalgam_graph",
    "enumerate_free_homs",
    "oracle_consistency",
    "oracle_separate",
]
