from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Union


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Atom:
    """name=value; a bare name (value None) is shorthand for name=true."""
    name: str
    value: Optional[str] = None

    @property
    def expected(self) -> str:
        return "true" if self.value is None else self.value


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Next:
    sub: "Formula"


@dataclass(frozen=True)
class Globally:
    sub: "Formula"


@dataclass(frozen=True)
class Finally:
    sub: "Formula"


@dataclass(frozen=True)
class Knows:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class PowerNext:
    n: int
    sub: "Formula"


Formula = Union[Top, Atom, Not, And, Or, Implies, Next, Globally, Finally, Knows, PowerNext]

TRUE: Formula = Top()
FALSE: Formula = Not(Top())


def conj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    return reduce(And, items) if items else TRUE


def disj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    return reduce(Or, items) if items else FALSE


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def dhat(i: str) -> Formula:
    """
    K_i(decision), read as: i knows the decision it has committed to towards c.
    Built on confirmed{i}, not decision{i}: a no-voter is committed to abort from its vote on.
    """
    return Knows(i, Or(Atom(f"confirmed{i}", "commit"), Atom(f"confirmed{i}", "abort")))


def atom_names(f: Formula) -> set:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, Top):
        return set()
    if isinstance(f, (And, Or, Implies)):
        return atom_names(f.left) | atom_names(f.right)
    return atom_names(f.sub)


def is_present_time(f: Formula) -> bool:
    """No temporal operator anywhere: the value at a point depends on the past only."""
    if isinstance(f, (Top, Atom)):
        return True
    if isinstance(f, (Next, Globally, Finally, PowerNext)):
        return False
    if isinstance(f, (And, Or, Implies)):
        return is_present_time(f.left) and is_present_time(f.right)
    return is_present_time(f.sub)


# binding strength for the printer: lower binds looser
_PREC = {Implies: 1, Or: 2, And: 3}


def pretty(f: Formula) -> str:
    """Concrete syntax accepted by parse(); parse(pretty(f)) == f."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Atom):
        return f.name if f.value is None else f"{f.name}={f.value}"
    if f == FALSE:
        return "false"
    if isinstance(f, Not):
        return "!" + _operand(f.sub)
    if isinstance(f, Next):
        return "X " + _operand(f.sub)
    if isinstance(f, Globally):
        return "G " + _operand(f.sub)
    if isinstance(f, Finally):
        return "F " + _operand(f.sub)
    if isinstance(f, PowerNext):
        return f"X^{f.n} " + _operand(f.sub)
    if isinstance(f, Knows):
        return f"K[{f.agent}] " + _operand(f.sub)

    op = {And: "&", Or: "|", Implies: "=>"}[type(f)]
    prec = _PREC[type(f)]
    left = pretty(f.left)
    right = pretty(f.right)
    # & and | associate to the left, => to the right
    if isinstance(f, Implies):
        if _PREC.get(type(f.left), 9) <= prec:
            left = f"({left})"
        if _PREC.get(type(f.right), 9) < prec:
            right = f"({right})"
    else:
        if _PREC.get(type(f.left), 9) < prec:
            left = f"({left})"
        if _PREC.get(type(f.right), 9) <= prec:
            right = f"({right})"
    return f"{left} {op} {right}"


def _operand(f: Formula) -> str:
    text = pretty(f)
    if type(f) in _PREC:
        return f"({text})"
    return text
