"""Tokenizer for Resin source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from resin.errors import Diagnostic, LexError

KEYWORDS = {"source", "target", "if", "and", "not"}
TYPE_NAMES = {"Probability", "Density", "Number", "Boolean"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"{self.kind}({self.text})"


# Order matters: two-character operators before their one-character prefixes,
# numbers before identifiers is irrelevant since identifiers cannot start with a digit.
_TOKEN_SPEC = [
    ("comment", r"#[^\n]*"),
    ("newline", r"\n"),
    ("ws", r"[ \t\r]+"),
    ("arrow_in", r"<-"),
    ("arrow_out", r"->"),
    ("rel_op", r">=|<=|==|>|<"),
    ("number", r"-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?"),
    ("path", r'"[a-zA-Z0-9_/]*"'),
    ("open_path", r'"'),
    ("word", r"[A-Za-z][a-zA-Z0-9_]*"),
    ("lparen", r"\("),
    ("rparen", r"\)"),
    ("comma", r","),
    ("dot", r"\."),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


def _classify_word(text: str) -> str:
    if text in KEYWORDS:
        return "kw"
    if text in TYPE_NAMES:
        return "type"
    if text[0].isupper():
        return "variable"
    return "id"


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens carrying 1-based line/column positions.

    Whitespace is dropped; ``#`` comments are kept as ``comment`` tokens so
    the parser can preserve them as statements.
    """
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(f"illegal character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "open_path":
            end = text.find('"', pos + 1)
            newline = text.find("\n", pos + 1)
            if end == -1 or (newline != -1 and newline < end):
                raise LexError("unterminated path string", line, col)
            bad = re.search(r"[^a-zA-Z0-9_/]", text[pos + 1 : end])
            raise LexError(
                f"illegal character {bad.group()!r} in path string",
                line,
                col + 1 + bad.start(),
            )
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind == "ws":
            pass
        elif kind == "word":
            tokens.append(Token(_classify_word(value), value, line, col))
        elif kind == "path":
            tokens.append(Token("path", value[1:-1], line, col))
        elif kind == "comment":
            tokens.append(Token("comment", value[1:].strip(), line, col))
        else:
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    return tokens


__all__ = ["Token", "tokenize", "LexError", "Diagnostic"]
