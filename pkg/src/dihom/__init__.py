"""Flows with discrete path spaces, full directed balls, and generalized T-homotopy."""

from .errors import (
    CycleError,
    DihomError,
    InvalidOccurrenceError,
    LoopError,
    NotLooplessError,
    NotTError,
    ParseError,
    SizeLimitError,
)
from .flow import (
    FlowMorphism,
    Generator,
    PresentedFlow,
    TableFlow,
    are_isomorphic,
    boundary_states,
    flow_of_poset,
    full_ball_violations,
    glob,
    is_full_directed_ball,
    is_loopless,
    point,
    presentation_of_poset,
    saturate,
    state_poset,
    tensor,
)
from .invariants import (
    BranchReport,
    ChainComplex,
    HomologyResult,
    branch_report,
    homology,
    nerve_complex,
    smith_normal_form,
)
from .poset import (
    Poset,
    PosetMap,
    chain,
    compose_maps,
    cube,
    identity_map,
    is_bounded,
    is_T_morphism,
    mk_poset,
    product,
    t_morphism_violations,
)
from .rewrite import (
    BallOccurrence,
    RefinementStep,
    edge_occurrence,
    find_ball_occurrences,
    occurrence_violations,
    refine,
    subdivide_edge,
)

__version__ = "0.1.0"
