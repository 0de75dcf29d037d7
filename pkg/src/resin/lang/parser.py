"""Recursive-descent parser for the Resin grammar."""

from __future__ import annotations

from resin.errors import ParseError
from resin.lang.ast import (
    Clause,
    Comment,
    Comparison,
    Constant,
    Literal,
    Number,
    Predicate,
    Program,
    SourceDecl,
    TargetDecl,
    Term,
    Variable,
)
from resin.lang.lexer import Token, tokenize

_DESCRIBE = {
    "arrow_in": '"<-"',
    "arrow_out": '"->"',
    "lparen": '"("',
    "rparen": '")"',
    "comma": '","',
    "dot": '"."',
    "path": "channel path",
    "type": "signal type",
    "id": "identifier",
    "rel_op": "comparison operator",
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- helpers -----------------------------------------------------------
    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def error(self, expected: list[str]) -> ParseError:
        tok = self.peek()
        want = " or ".join(expected)
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line, col = (last.line, last.col + len(last.text)) if last else (1, 1)
            return ParseError(f"unexpected end of input, expected {want}", line, col)
        return ParseError(f"unexpected {tok.kind} {tok.text!r}, expected {want}", tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            raise self.error([f'"{text}"' if text else _DESCRIBE.get(kind, kind)])
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    # -- grammar -----------------------------------------------------------
    def program(self) -> Program:
        statements = []
        while self.peek() is not None:
            statements.append(self.statement())
        return Program(tuple(statements))

    def statement(self):
        tok = self.peek()
        if tok.kind == "comment":
            self.pos += 1
            return Comment(tok.text, tok.line, tok.col)
        if tok.kind != "id":
            raise self.error(["identifier", "comment"])
        head = self.predicate()
        if self.at("arrow_in"):
            self.pos += 1
            self.expect("kw", "source")
            self.expect("lparen")
            channel = self.expect("path").text
            self.expect("comma")
            dtype = self.expect("type").text
            self.expect("rparen")
            self.expect("dot")
            return SourceDecl(head, channel, dtype, tok.line, tok.col)
        if self.at("arrow_out"):
            self.pos += 1
            self.expect("kw", "target")
            self.expect("lparen")
            channel = self.expect("path").text
            self.expect("rparen")
            self.expect("dot")
            return TargetDecl(head, channel, tok.line, tok.col)
        if self.at("kw", "if"):
            self.pos += 1
            body = [self.literal()]
            while self.at("kw", "and"):
                self.pos += 1
                body.append(self.literal())
            self.expect("dot")
            return Clause(head, tuple(body), tok.line, tok.col)
        raise self.error(['"<-"', '"->"', '"if"'])

    def literal(self) -> Literal:
        negated = False
        if self.at("kw", "not"):
            self.pos += 1
            negated = True
        start = self.peek()
        lhs = self.term()
        if self.at("rel_op"):
            op = self.tokens[self.pos].text
            self.pos += 1
            rhs = self.term()
            return Literal(Comparison(lhs, op, rhs), negated)
        if isinstance(lhs, Constant):
            return Literal(Predicate(lhs.name), negated)
        if isinstance(lhs, Predicate):
            return Literal(lhs, negated)
        # a variable or number standing alone cannot be an atom
        self.pos -= 1
        raise ParseError(
            f"{start.kind} {start.text!r} is not an atom; expected a predicate or comparison",
            start.line,
            start.col,
        )

    def predicate(self) -> Predicate:
        name = self.expect("id").text
        if not self.at("lparen"):
            return Predicate(name)
        self.pos += 1
        args = [self.term()]
        while self.at("comma"):
            self.pos += 1
            args.append(self.term())
        self.expect("rparen")
        return Predicate(name, tuple(args))

    def term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise self.error(["term"])
        if tok.kind == "variable":
            self.pos += 1
            return Variable(tok.text)
        if tok.kind == "number":
            self.pos += 1
            return Number(float(tok.text))
        if tok.kind == "id":
            if self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1].kind == "lparen":
                return self.predicate()
            self.pos += 1
            return Constant(tok.text)
        raise self.error(["variable", "identifier", "number"])


def parse(tokens: list[Token]) -> Program:
    """Build a :class:`Program` from a token stream produced by :func:`tokenize`."""
    return _Parser(tokens).program()


def parse_text(text: str) -> Program:
    return parse(tokenize(text))
