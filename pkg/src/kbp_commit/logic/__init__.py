from kbp_commit.logic.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Finally,
    Formula,
    Globally,
    Implies,
    Knows,
    Next,
    Not,
    Or,
    PowerNext,
    Top,
    conj,
    dhat,
    disj,
    iff,
    pretty,
)
from kbp_commit.logic.parser import parse
from kbp_commit.logic.checker import Trace, Verdict, check, holds, indistinguishable

__all__ = [
    "FALSE",
    "TRUE",
    "And",
    "Atom",
    "Finally",
    "Formula",
    "Globally",
    "Implies",
    "Knows",
    "Next",
    "Not",
    "Or",
    "PowerNext",
    "Top",
    "Trace",
    "Verdict",
    "check",
    "conj",
    "dhat",
    "disj",
    "holds",
    "iff",
    "indistinguishable",
    "parse",
    "pretty",
]
