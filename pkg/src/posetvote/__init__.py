"""Necessary and possible winners of positional scoring rules over partial votes."""

from .orders import (
    BoundError,
    CycleError,
    PartialOrder,
    PartialProfile,
    PreconditionError,
    Ranking,
    TotalProfile,
    classify_structure,
    density,
    enumerate_completions,
    is_extension,
    kendall_tau,
    profile_density,
)
from .rules import ScoringRule, parse_rule, score_vector, winners
from .nw import NwWorkspace, adversarial_pair, check_nw, nw_set, nw_set_baseline
from .flow import pw_set_plurality, pw_set_veto
from .ilp import build_pw_model, export_lp, parse_lp, pw_check_ilp
from .pipeline import PhaseReport, phase1, phase2_try_completion, pw_set
from .oracle import brute_force_nw, brute_force_pw
from .profile_io import ingest_pairwise, ingest_ratings, parse_profile, write_profile

__version__ = "0.1.0"
