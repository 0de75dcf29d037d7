"""Malformed programs and the diagnostic each one must produce."""

from resin.errors import CompileError, LexError, ParseError, TypeCheckError

SRC = 'a <- source("/a", Probability).\nb <- source("/b", Probability).\n'

# name -> (text, error class, diagnostic kind, (line, col))
MALFORMED = {
    "missing-terminator": ('d -> target("/d")', ParseError, "parse-error", (1, 18)),
    "illegal-character": (SRC + "d if a & b.\n", LexError, "lex-error", (3, 8)),
    "unterminated-path": ('a <- source("/a, Probability).\n', LexError, "lex-error", (1, 13)),
    "unknown-type": ('a <- source("/a", Float).\n', ParseError, "parse-error", (1, 19)),
    "probability-comparison": (
        'rain <- source("/rain", Probability).\nwet if rain > 0.5.\nwet -> target("/wet").\n',
        TypeCheckError,
        "comparison-type",
        (2, 1),
    ),
    "unknown-atom": (SRC + "d if a and c.\nd -> target(\"/d\").\n", TypeCheckError, "unknown-atom", (3, 1)),
    "redeclared-source": (SRC + 'a <- source("/a2", Probability).\n', TypeCheckError, "redeclared-source", (3, 1)),
    "unsafe-variable": (SRC + 'p(X) if a.\np(x) -> target("/p").\n', TypeCheckError, "unsafe-variable", (3, 1)),
    "function-term": (
        'q(f(k)) <- source("/q", Probability).\np if q(f(k)).\np -> target("/p").\n',
        TypeCheckError,
        "function-term",
        (1, 1),
    ),
    "non-stratified": (
        SRC + 'p if a and not q.\nq if b and not p.\np -> target("/p").\n',
        CompileError,
        "non-stratified",
        None,
    ),
    "unknown-target": (SRC + 'd if a.\ne -> target("/e").\n', TypeCheckError, "unknown-target", (4, 1)),
    "duplicate-channel": ('a <- source("/a", Probability).\nb <- source("/a", Probability).\n', TypeCheckError, "duplicate-channel", (2, 1)),
}
