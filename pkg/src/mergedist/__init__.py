"""Distances between merge trees: barcodes, cophenetic vectors, interleavings
and presentation-based metrics, with sublevel filtrations on graphs."""

from .errors import (
    IncompatibleError,
    InvalidTreeError,
    MergeDistError,
    PresentationError,
    ScaleGuardError,
    UnknownNodeError,
)
from .filtration import (
    CellComplex1,
    CellularFunction,
    component_presentations,
    geometric_lift,
    incidence_presentation,
    is_monotone,
    lp_function_distance,
    sublevel_merge_forest,
)
from .metrics import *  # noqa: F401,F403
from .presentation import (
    LabelVector,
    Presentation,
    Relation,
    add_trivial_pair,
    are_compatible,
    coequalize,
    label_distance,
    minimal_presentation,
    pad_concatenate,
)
from .trees import (
    MergeForest,
    MergeNode,
    MergeTree,
    PersistentSetRep,
    evolution_map,
    from_persistent_set,
    is_isomorphic,
    leaves,
    nested,
    to_persistent_set,
    validate,
)

__version__ = "0.1.0"
