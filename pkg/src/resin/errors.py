"""Diagnostics shared by the compiler pipeline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    line: int = 0
    col: int = 0

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.kind}: {self.message}"


class ResinError(Exception):
    """Base class for every user-facing Resin error.

    ``diagnostics`` holds one entry per problem found; the first one doubles
    as the exception message.
    """

    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0, diagnostics=None, kind: str | None = None):
        if diagnostics is None:
            diagnostics = [Diagnostic(kind or self.kind, message, line, col)]
        self.diagnostics: list[Diagnostic] = list(diagnostics)
        first = self.diagnostics[0]
        super().__init__(f"{first.line}:{first.col}: {first.message}")

    @property
    def kinds(self) -> list[str]:
        return [d.kind for d in self.diagnostics]

    def format(self, filename: str = "<input>") -> str:
        return "\n".join(d.format(filename) for d in self.diagnostics)


class LexError(ResinError):
    kind = "lex-error"


class ParseError(ResinError):
    kind = "parse-error"


class TypeCheckError(ResinError):
    kind = "type-error"


class CompileError(ResinError):
    kind = "compile-error"


class CircuitError(ResinError):
    kind = "circuit-error"
