"""Resin language frontend: tokenizer, parser, syntax tree and type checker."""

from resin.lang.ast import Program, pretty
from resin.lang.lexer import Token, tokenize
from resin.lang.parser import parse, parse_text
from resin.lang.typecheck import ComparisonSite, SourceInfo, TypedProgram, typecheck


def load_program(text: str) -> TypedProgram:
    """Tokenize, parse and type check ``text`` in one go."""
    return typecheck(parse(tokenize(text)))


__all__ = [
    "ComparisonSite",
    "Program",
    "SourceInfo",
    "Token",
    "TypedProgram",
    "load_program",
    "parse",
    "parse_text",
    "pretty",
    "tokenize",
    "typecheck",
]
