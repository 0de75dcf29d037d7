"""Name resolution and type checking of parsed Resin programs.

Checks performed, each reported with its own diagnostic kind:

=========================  ==================================================
kind                       meaning
=========================  ==================================================
``unknown-atom``           atom is neither a declared source nor a rule head
``redeclared-source``      the same ground source atom is declared twice
``duplicate-channel``      two declarations share a channel path
``inconsistent-source``    one source predicate declared with several types
``nonground-declaration``  variables inside a source or target declaration
``source-head``            a rule derives an atom declared as a source
``comparison-type``        comparison operands violate the coercion table
``comparison-required``    Number/Density source used as a plain literal
``function-term``          nested predicate terms inside arguments
``unsafe-variable``        variable not bound by a positive body atom
``unknown-target``         target atom is neither a rule head nor a source
=========================  ==================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field

from resin.errors import Diagnostic, TypeCheckError
from resin.lang.ast import (
    FLIPPED,
    Clause,
    Comparison,
    Constant,
    Number,
    Predicate,
    Program,
    SourceDecl,
    TargetDecl,
    Term,
    Variable,
    term_variables,
)

PLAIN_TYPES = {"Boolean", "Probability"}
COMPARABLE_TYPES = {"Number", "Density"}


@dataclass(frozen=True)
class SourceInfo:
    atom: Predicate
    channel: str
    dtype: str

    @property
    def name(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class ComparisonSite:
    """A comparison normalised so that a signal sits on the left-hand side.

    ``coercion`` is ``"cdf"`` when the left operand is a Density (weight via
    the Gaussian CDF) and ``"threshold"`` when it is a Number (0/1 weight).
    ``rhs`` is either a :class:`Number` or a source :class:`Predicate`.
    """

    lhs: Predicate
    op: str
    rhs: Number | Predicate
    coercion: str

    def __str__(self) -> str:
        return f"{self.lhs}{self.op}{self.rhs}"


@dataclass
class TypedProgram:
    program: Program
    sources: dict[str, SourceInfo]
    source_types: dict[tuple[str, int], str]
    derived: set[tuple[str, int]]
    targets: list[TargetDecl]
    clauses: list[Clause]
    sites: dict[Comparison, ComparisonSite] = field(default_factory=dict)

    def source_for(self, atom: Predicate) -> SourceInfo | None:
        return self.sources.get(str(atom))


def _is_flat(term: Term) -> bool:
    return not isinstance(term, Predicate)


class _Checker:
    def __init__(self, program: Program):
        self.program = program
        self.errors: list[Diagnostic] = []

    def err(self, kind: str, message: str, stmt) -> None:
        self.errors.append(Diagnostic(kind, message, stmt.line, stmt.col))

    def run(self) -> TypedProgram:
        sources: dict[str, SourceInfo] = {}
        source_types: dict[tuple[str, int], str] = {}
        channels: dict[str, object] = {}

        for decl in self.program.sources:
            if not decl.atom.is_ground():
                self.err("nonground-declaration", f"source atom {decl.atom} contains variables", decl)
                continue
            if not all(_is_flat(a) for a in decl.atom.args):
                self.err("function-term", f"function terms unsupported in {decl.atom}", decl)
                continue
            name = str(decl.atom)
            if name in sources:
                self.err("redeclared-source", f"source {name} declared more than once", decl)
                continue
            if decl.channel in channels:
                self.err("duplicate-channel", f'channel "{decl.channel}" already in use', decl)
                continue
            sig = decl.atom.signature
            if source_types.setdefault(sig, decl.dtype) != decl.dtype:
                self.err(
                    "inconsistent-source",
                    f"source predicate {sig[0]}/{sig[1]} declared as both {source_types[sig]} and {decl.dtype}",
                    decl,
                )
                continue
            channels[decl.channel] = decl
            sources[name] = SourceInfo(decl.atom, decl.channel, decl.dtype)

        derived: set[tuple[str, int]] = set()
        for clause in self.program.clauses:
            if clause.head.signature in source_types:
                self.err("source-head", f"rule head {clause.head} is declared as a source", clause)
            derived.add(clause.head.signature)

        self.sources, self.source_types, self.derived = sources, source_types, derived
        sites: dict[Comparison, ComparisonSite] = {}
        for clause in self.program.clauses:
            self.check_clause(clause, sites)

        target_channels: set[str] = set()
        for decl in self.program.targets:
            if not decl.atom.is_ground():
                self.err("nonground-declaration", f"target atom {decl.atom} contains variables", decl)
                continue
            if decl.channel in channels or decl.channel in target_channels:
                self.err("duplicate-channel", f'channel "{decl.channel}" already in use', decl)
            target_channels.add(decl.channel)
            if decl.atom.signature not in derived and str(decl.atom) not in sources:
                self.err("unknown-target", f"target {decl.atom} is neither derived nor a source", decl)

        if self.errors:
            raise TypeCheckError("", diagnostics=self.errors)
        return TypedProgram(
            self.program, sources, source_types, derived, self.program.targets, self.program.clauses, sites
        )

    def check_clause(self, clause: Clause, sites: dict) -> None:
        bound: set[str] = set()
        needs: set[str] = set()
        for arg in clause.head.args:
            if isinstance(arg, Predicate):
                self.err("function-term", f"function terms unsupported in head {clause.head}", clause)
        needs |= term_variables(clause.head)

        for lit in clause.body:
            atom = lit.atom
            if isinstance(atom, Predicate):
                if not all(_is_flat(a) for a in atom.args):
                    self.err("function-term", f"function terms unsupported in {atom}", clause)
                    continue
                sig = atom.signature
                if sig in self.source_types:
                    dtype = self.source_types[sig]
                    if dtype in COMPARABLE_TYPES:
                        self.err(
                            "comparison-required",
                            f"{dtype} source {atom} must be used inside a comparison",
                            clause,
                        )
                elif sig not in self.derived:
                    self.err("unknown-atom", f"unknown atom {atom}", clause)
                    continue
                if lit.negated:
                    needs |= term_variables(atom)
                else:
                    bound |= term_variables(atom)
            else:
                site = self.check_comparison(atom, clause)
                if site is None:
                    continue
                sites[atom] = site
                # source terms inside a comparison bind their variables by matching declared sources
                for side in (site.lhs, site.rhs):
                    if isinstance(side, Predicate):
                        bound |= term_variables(side)

        for var in sorted(needs - bound):
            self.err("unsafe-variable", f"variable {var} is not bound by a positive body atom", clause)

    def operand(self, term: Term, clause: Clause):
        """Classify a comparison operand as ('number', Number) or ('source', Predicate, dtype)."""
        if isinstance(term, Number):
            return ("number", term)
        if isinstance(term, Variable):
            self.err("comparison-type", f"variable {term} cannot be compared directly", clause)
            return None
        pred = Predicate(term.name) if isinstance(term, Constant) else term
        if not all(_is_flat(a) for a in pred.args):
            self.err("function-term", f"function terms unsupported in {pred}", clause)
            return None
        sig = pred.signature
        if sig in self.source_types:
            return ("source", pred, self.source_types[sig])
        if sig in self.derived:
            self.err("comparison-type", f"derived atom {pred} cannot be compared", clause)
        else:
            self.err("unknown-atom", f"unknown atom {pred}", clause)
        return None

    def check_comparison(self, cmp: Comparison, clause: Clause) -> ComparisonSite | None:
        left = self.operand(cmp.lhs, clause)
        right = self.operand(cmp.rhs, clause)
        if left is None or right is None:
            return None
        op = cmp.op
        if left[0] == "number" and right[0] == "source":
            left, right, op = right, left, FLIPPED[op]
        elif left[0] == "source" and right[0] == "source" and left[2] == "Number" and right[2] == "Density":
            left, right, op = right, left, FLIPPED[op]
        if left[0] == "number":
            self.err("comparison-type", f"comparison {cmp} involves no signal", clause)
            return None
        dtype = left[2]
        if dtype not in COMPARABLE_TYPES:
            self.err("comparison-type", f"{dtype} source {left[1]} cannot be compared in {cmp}", clause)
            return None
        if right[0] == "source" and right[2] != "Number":
            self.err(
                "comparison-type",
                f"{right[2]} source {right[1]} cannot be the threshold of {cmp}",
                clause,
            )
            return None
        coercion = "cdf" if dtype == "Density" else "threshold"
        return ComparisonSite(left[1], op, right[1], coercion)


def typecheck(program: Program) -> TypedProgram:
    """Resolve every atom of ``program`` and validate signal types.

    Raises :class:`TypeCheckError` carrying one diagnostic per problem.
    """
    return _Checker(program).run()
