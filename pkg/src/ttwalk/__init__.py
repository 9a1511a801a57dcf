"""Random walks of elementary Nielsen automorphisms and the train track maps they build."""
from .errors import (
    CapExceededError,
    ContradictionError,
    ConvergenceError,
    InvalidRankError,
    MalformedInputError,
    PreconditionError,
    SearchFailure,
)
from .free_group import Word, cyclic_reduce, reduce
from .nielsen import (
    NielsenAuto,
    NielsenSequence,
    enumerate_S,
    find_seed_sequence,
    is_admissible,
    is_cyclically_admissible,
    prevention_block,
    seed_sequence,
)
from .rose_map import RoseMap, compose, find_inp, from_sequence, gates, is_train_track, whitehead_graph
from .folds import PermAuto, fold_decomposition, realize_power
from .walk import WalkConfig, estimate_E_n_prob, sample_trajectory
from .spectral import estimate_lyapunov, spectral_radius, stretch_factor
from .invariants import Caps, GReport, IndexReport, check_property_G, ideal_whitehead_graph, index_report

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "Caps",
    "ContradictionError",
    "ConvergenceError",
    "GReport",
    "IndexReport",
    "InvalidRankError",
    "MalformedInputError",
    "NielsenAuto",
    "NielsenSequence",
    "PermAuto",
    "PreconditionError",
    "RoseMap",
    "SearchFailure",
    "WalkConfig",
    "Word",
    "check_property_G",
    "compose",
    "cyclic_reduce",
    "enumerate_S",
    "estimate_E_n_prob",
    "estimate_lyapunov",
    "find_inp",
    "find_seed_sequence",
    "fold_decomposition",
    "from_sequence",
    "gates",
    "ideal_whitehead_graph",
    "index_report",
    "is_admissible",
    "is_cyclically_admissible",
    "is_train_track",
    "prevention_block",
    "realize_power",
    "reduce",
    "sample_trajectory",
    "seed_sequence",
    "spectral_radius",
    "stretch_factor",
    "whitehead_graph",
]
