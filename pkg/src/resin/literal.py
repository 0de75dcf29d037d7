from __future__ import annotations

from typing import NamedTuple


class Literal(NamedTuple):
    """A signed reference to a source atom."""

    atom: str
    negated: bool = False

    def __str__(self) -> str:
        return f"~{self.atom}" if self.negated else self.atom

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    @classmethod
    def parse(cls, text: str) -> "Literal":
        if text.startswith("~"):
            return cls(text[1:], True)
        return cls(text, False)


def pos(atom: str) -> Literal:
    return Literal(atom, False)


def neg(atom: str) -> Literal:
    return Literal(atom, True)
