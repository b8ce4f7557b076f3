from kbp_commit.refinement.candidates import CandidatePredicate, builtin_candidates, make_candidate
from kbp_commit.refinement.harness import Obligation, verify_candidate
from kbp_commit.refinement.candidate_file import RefineReport, load_candidates, refine_loop, verify_all

__all__ = [
    "CandidatePredicate",
    "Obligation",
    "RefineReport",
    "builtin_candidates",
    "load_candidates",
    "make_candidate",
    "refine_loop",
    "verify_all",
    "verify_candidate",
]
