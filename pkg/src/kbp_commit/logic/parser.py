"""
pyparsing grammar for the ASCII formula language:

    phi ::= true | false | name | name=value | dhat[i]
          | !phi | X phi | X^n phi | G phi | F phi | K[agent] phi
          | phi & phi | phi | phi | phi => phi | phi <=> phi | ( phi )

Prefix operators bind tightest, then &, then |, then =>, then <=>.
& and | group to the left; => and <=> to the right.
"""
from __future__ import annotations

from functools import lru_cache, partial, reduce

from pyparsing import (
    Keyword,
    Literal,
    Optional,
    ParseBaseException,
    ParseFatalException,
    ParserElement,
    Regex,
    alphanums,
    infixNotation,
    opAssoc,
)

from kbp_commit.errors import FormulaSyntaxError
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
    dhat,
    iff,
)

# five precedence levels re-parse their operands; the cache keeps that linear
ParserElement.enablePackrat()

_IDENT_CHARS = alphanums + "_."


def _atom(s, loc, t):
    name = t.name
    if name == "K":
        raise ParseFatalException(s, loc, "K needs an agent, as in K[c]")
    if t.value == "":
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        return Atom(name)
    return Atom(name, t.value)


def _prefix(t):
    items = t[0]
    sub = items[-1]
    for op in reversed(items[:-1]):
        sub = op(sub)
    return sub


def _left(op):
    def fold(t):
        return reduce(op, t[0][0::2])
    return fold


def _right(op):
    def fold(t):
        operands = t[0][0::2]
        return reduce(lambda acc, f: op(f, acc), reversed(operands[:-1]), operands[-1])
    return fold


@lru_cache(maxsize=None)
def formula_grammar() -> ParserElement:
    name = Regex(r"[A-Za-z_][A-Za-z0-9_.]*(?:@-\d+)?")
    value = Regex(r"[A-Za-z0-9_.]+")
    equals = Regex(r"=(?!>)").suppress()
    # once '=' is read a value must follow
    atom = (name("name") + Optional(equals - value, default="")("value")).setParseAction(_atom)
    dhat_macro = Regex(r"dhat\[(?P<agent>[A-Za-z0-9_]+)\]").setParseAction(lambda t: dhat(t.agent))

    knows = Regex(r"K\[(?P<agent>[A-Za-z0-9_]+)\]").setParseAction(lambda t: partial(Knows, t.agent))
    power_next = Regex(r"X\^(?P<n>\d+)").setParseAction(lambda t: partial(PowerNext, int(t.n)))
    prefix_op = (
        power_next
        | knows
        | Keyword("X", identChars=_IDENT_CHARS).setParseAction(lambda: Next)
        | Keyword("G", identChars=_IDENT_CHARS).setParseAction(lambda: Globally)
        | Keyword("F", identChars=_IDENT_CHARS).setParseAction(lambda: Finally)
        | Literal("!").setParseAction(lambda: Not)
    )

    return infixNotation(dhat_macro | atom, [
        (prefix_op, 1, opAssoc.RIGHT, _prefix),
        (Literal("&"), 2, opAssoc.LEFT, _left(And)),
        (Literal("|"), 2, opAssoc.LEFT, _left(Or)),
        (Literal("=>"), 2, opAssoc.RIGHT, _right(Implies)),
        (Literal("<=>"), 2, opAssoc.RIGHT, _right(iff)),
    ])


def parse(text: str) -> Formula:
    """Parse one formula; raises FormulaSyntaxError carrying the offending position."""
    try:
        result = formula_grammar().parseString(text, parseAll=True)
    except ParseBaseException as e:
        raise FormulaSyntaxError(e.msg, e.loc, text) from None
    return result[0]
