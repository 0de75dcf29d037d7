"""Syntax tree for Resin programs, with a pretty-printer that re-parses to the same tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    """A bare lower-case identifier in term position."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Number:
    value: float

    def __str__(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Predicate:
    """``name(arg, ...)``; zero-arity predicates print without parentheses."""

    name: str
    args: tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.name, len(self.args))

    def is_ground(self) -> bool:
        return not any(_has_variable(a) for a in self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Term = Union[Variable, Constant, Number, Predicate]

REL_OPS = (">", "<", "==", ">=", "<=")
FLIPPED = {">": "<", "<": ">", ">=": "<=", "<=": ">=", "==": "=="}


@dataclass(frozen=True)
class Comparison:
    lhs: Term
    op: str
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


Atom = Union[Predicate, Comparison]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


# Statements carry their source position for diagnostics; it is excluded from equality
# so that a pretty-printed program re-parses to an equal tree.
@dataclass(frozen=True)
class SourceDecl:
    atom: Predicate
    channel: str
    dtype: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f'{self.atom} <- source("{self.channel}", {self.dtype}).'


@dataclass(frozen=True)
class TargetDecl:
    atom: Predicate
    channel: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f'{self.atom} -> target("{self.channel}").'


@dataclass(frozen=True)
class Clause:
    head: Predicate
    body: tuple[Literal, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.head} if {' and '.join(str(lit) for lit in self.body)}."


@dataclass(frozen=True)
class Comment:
    text: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"# {self.text}" if self.text else "#"


Statement = Union[SourceDecl, TargetDecl, Clause, Comment]


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...]

    @property
    def sources(self) -> list[SourceDecl]:
        return [s for s in self.statements if isinstance(s, SourceDecl)]

    @property
    def targets(self) -> list[TargetDecl]:
        return [s for s in self.statements if isinstance(s, TargetDecl)]

    @property
    def clauses(self) -> list[Clause]:
        return [s for s in self.statements if isinstance(s, Clause)]

    def __str__(self) -> str:
        return pretty(self)


def pretty(program: Program) -> str:
    return "".join(f"{stmt}\n" for stmt in program.statements)


def _has_variable(term: Term) -> bool:
    if isinstance(term, Variable):
        return True
    if isinstance(term, Predicate):
        return any(_has_variable(a) for a in term.args)
    return False


def term_variables(term: Term) -> set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, Predicate):
        out: set[str] = set()
        for a in term.args:
            out |= term_variables(a)
        return out
    return set()


def atom_variables(atom: Atom) -> set[str]:
    if isinstance(atom, Comparison):
        return term_variables(atom.lhs) | term_variables(atom.rhs)
    return term_variables(atom)
