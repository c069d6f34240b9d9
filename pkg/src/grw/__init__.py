"""Graph rewriting with negative conditions and shift commands, plus termination analysis."""

from .engine import (
    GRS,
    DerivationSpace,
    LimitReached,
    Loops,
    Pipeline,
    RewriteStep,
    Terminates,
    decide_termination_from,
    derivation_height_of,
    explore,
    normalize,
    run_pipeline,
    step_all,
)
from .graph import Alphabets, Graph, canonical_key, decompose, make_graph
from .patterns import Pattern, check_pattern, find_matchings, is_matching, make_pattern
from .rules import (
    AddEdge,
    DelEdge,
    DelNode,
    Label,
    Rule,
    Shift,
    apply_commands,
    check_consistency,
    effective_commands,
    is_uniform,
    shift_map,
)
from .termination import (
    BoundConstants,
    CompatibilityReport,
    ContextualWeight,
    LexicographicWeight,
    bound_constants,
    check_compatible,
    check_lexicographic,
    energy,
    evaluate_eta,
    evaluate_pi,
    evaluate_w,
    kappa,
    rule_deltas,
    synthesize_weight,
)

__version__ = "0.1.0"
