"""Grounding, stable-model enumeration and the weighted-model-counting polynomial.

A typed program is grounded by matching positive body atoms against the atoms
that can possibly hold (declared sources plus everything derivable from them).
Comparison literals become *virtual* source atoms whose weight is supplied by
the coercion pipeline at runtime.  For every target, the relevant ground rules
are evaluated under all 2^N assignments of the relevant source atoms at once:
each atom's truth table is one Python integer with bit ``m`` standing for
assignment ``m``, so the stratified fixpoint runs as bitwise AND/OR/NOT.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

import networkx as nx

from resin.errors import CompileError
from resin.lang.ast import Comparison, Constant, Number, Predicate, Term, Variable
from resin.lang.typecheck import ComparisonSite, TypedProgram
from resin.literal import Literal
from resin.semiring import PROBABILITY, Semiring

DEFAULT_MAX_SOURCES = 24


@dataclass(frozen=True)
class GroundSite:
    """A ground comparison between a source atom and a number or Number source."""

    lhs: str
    op: str
    rhs: float | str
    coercion: str

    @property
    def name(self) -> str:
        rhs = repr(float(self.rhs)) if isinstance(self.rhs, (int, float)) else self.rhs
        return f"{self.lhs}{self.op}{rhs}"

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "op": self.op, "rhs": self.rhs, "coercion": self.coercion}


@dataclass(frozen=True)
class GroundSource:
    """A source atom of a ground program.

    ``kind`` is ``"source"`` for a declared signal and ``"comparison"`` for a
    virtual atom standing for a comparison site.
    """

    name: str
    kind: str
    dtype: str
    channels: tuple[str, ...]
    site: GroundSite | None = None


@dataclass(frozen=True)
class GroundRule:
    head: str
    pos: tuple[str, ...]
    neg: tuple[str, ...]

    def __str__(self) -> str:
        body = [*self.pos, *(f"not {a}" for a in self.neg)]
        return f"{self.head} :- {', '.join(body)}." if body else f"{self.head}."


@dataclass
class GroundProgram:
    target: str
    target_channel: str
    sources: list[GroundSource]
    rules: list[GroundRule]
    strata: dict[str, int] = field(default_factory=dict)

    @property
    def source_names(self) -> list[str]:
        return [s.name for s in self.sources]


@dataclass(frozen=True)
class StableModel:
    """A total assignment to the source atoms under which the target is derived.

    Bit ``i`` of ``mask`` is the truth value of ``atoms[i]``.
    """

    atoms: tuple[str, ...]
    mask: int

    @property
    def assignment(self) -> dict[str, bool]:
        return {a: bool(self.mask >> i & 1) for i, a in enumerate(self.atoms)}

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(Literal(a, not (self.mask >> i & 1)) for i, a in enumerate(self.atoms))

    @property
    def bits(self) -> str:
        return "".join("1" if self.mask >> i & 1 else "0" for i in range(len(self.atoms)))

    def __str__(self) -> str:
        return "{" + ", ".join(str(lit).replace("~", "¬") for lit in self.literals) + "}"


@dataclass(frozen=True)
class WmcPolynomial:
    """Sum over terms of the product of the terms' literal weights."""

    atoms: tuple[str, ...]
    terms: tuple[tuple[Literal, ...], ...]

    def evaluate(self, weights: Mapping[Literal, Any], sr: Semiring = PROBABILITY) -> Any:
        return sr.sum(sr.prod(weights[lit] for lit in term) for term in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("·".join(f"P({str(l).replace('~', '¬')})" for l in t) for t in self.terms)


# -- grounding ---------------------------------------------------------------


def _match(pattern: Predicate, atom: Predicate, binding: dict[str, Term]) -> dict[str, Term] | None:
    if pattern.name != atom.name or len(pattern.args) != len(atom.args):
        return None
    out = binding
    for p, a in zip(pattern.args, atom.args):
        if isinstance(p, Variable):
            bound = out.get(p.name)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[p.name] = a
            elif bound != a:
                return None
        elif p != a:
            return None
    return out


def _substitute(term: Term, binding: Mapping[str, Term]) -> Term:
    if isinstance(term, Variable):
        return binding[term.name]
    if isinstance(term, Predicate):
        return Predicate(term.name, tuple(_substitute(a, binding) for a in term.args))
    return term


class _Grounder:
    def __init__(self, typed: TypedProgram):
        self.typed = typed
        self.possible: dict[tuple[str, int], dict[str, Predicate]] = {}
        for info in typed.sources.values():
            self.possible.setdefault(info.atom.signature, {})[info.name] = info.atom
        self.virtual: dict[str, GroundSource] = {}

    def candidates(self, pattern: Predicate, sources_only: bool) -> Iterable[Predicate]:
        atoms = self.possible.get(pattern.signature, {})
        if sources_only:
            return [a for name, a in atoms.items() if name in self.typed.sources]
        return list(atoms.values())

    def bindings(self, clause) -> Iterator[dict[str, Term]]:
        goals: list[tuple[Predicate, bool]] = []
        for lit in clause.body:
            if isinstance(lit.atom, Predicate) and not lit.negated:
                goals.append((lit.atom, False))
            elif isinstance(lit.atom, Comparison):
                site = self.typed.sites[lit.atom]
                for side in (site.lhs, site.rhs):
                    if isinstance(side, Predicate):
                        goals.append((side, True))

        def search(i: int, binding: dict[str, Term]):
            if i == len(goals):
                yield binding
                return
            pattern, sources_only = goals[i]
            for atom in self.candidates(pattern, sources_only):
                nxt = _match(pattern, atom, binding)
                if nxt is not None:
                    yield from search(i + 1, nxt)

        yield from search(0, {})

    def virtual_atom(self, site: ComparisonSite, binding) -> str:
        lhs = str(_substitute(site.lhs, binding))
        if isinstance(site.rhs, Number):
            rhs: float | str = site.rhs.value
        else:
            rhs = str(_substitute(site.rhs, binding))
        gs = GroundSite(lhs, site.op, rhs, site.coercion)
        if gs.name not in self.virtual:
            channels = [self.typed.sources[lhs].channel]
            if isinstance(rhs, str):
                channels.append(self.typed.sources[rhs].channel)
            dtype = self.typed.sources[lhs].dtype
            self.virtual[gs.name] = GroundSource(gs.name, "comparison", dtype, tuple(channels), gs)
        return gs.name

    def ground_once(self) -> list[GroundRule]:
        rules: dict[GroundRule, None] = {}
        for clause in self.typed.clauses:
            for binding in self.bindings(clause):
                head = _substitute(clause.head, binding)
                pos_atoms: list[str] = []
                neg_atoms: list[str] = []
                for lit in clause.body:
                    if isinstance(lit.atom, Comparison):
                        name = self.virtual_atom(self.typed.sites[lit.atom], binding)
                    else:
                        atom = _substitute(lit.atom, binding)
                        name = str(atom)
                        if lit.negated and name not in self.possible.get(atom.signature, {}):
                            continue  # "not x" with x never derivable is always true
                    (neg_atoms if lit.negated else pos_atoms).append(name)
                rule = GroundRule(str(head), tuple(dict.fromkeys(pos_atoms)), tuple(dict.fromkeys(neg_atoms)))
                rules[rule] = None
                self.possible.setdefault(head.signature, {}).setdefault(str(head), head)
        return list(rules)

    def run(self) -> list[GroundRule]:
        # Negative literals are only dropped once an atom is known underivable,
        # so re-ground until the set of possible atoms stops growing.
        while True:
            before = sum(len(v) for v in self.possible.values())
            rules = self.ground_once()
            if sum(len(v) for v in self.possible.values()) == before:
                return rules


def _stratify(rules: list[GroundRule], source_names: set[str]) -> dict[str, int]:
    graph = nx.DiGraph()
    for rule in rules:
        graph.add_node(rule.head)
        for atom, negative in [*((a, False) for a in rule.pos), *((a, True) for a in rule.neg)]:
            if atom in source_names:
                continue
            if graph.has_edge(rule.head, atom):
                negative = negative or graph.edges[rule.head, atom]["negative"]
            graph.add_edge(rule.head, atom, negative=negative)

    component_of: dict[str, int] = {}
    components = list(nx.strongly_connected_components(graph))
    for idx, comp in enumerate(components):
        for atom in comp:
            component_of[atom] = idx
    for u, v, data in graph.edges(data=True):
        if data["negative"] and component_of[u] == component_of[v]:
            cycle = sorted(components[component_of[u]])
            raise CompileError(
                f"negation cycle through {{{', '.join(cycle)}}}; program is not stratified",
                kind="non-stratified",
            )

    condensed = nx.condensation(graph, scc=components)
    stratum: dict[int, int] = {}
    for comp in reversed(list(nx.topological_sort(condensed))):
        level = 0
        for _, dep in condensed.out_edges(comp):
            members = condensed.nodes[comp]["members"]
            dep_members = condensed.nodes[dep]["members"]
            negative = any(
                graph.edges[u, v]["negative"]
                for u in members
                for v in graph.successors(u)
                if v in dep_members
            )
            level = max(level, stratum[dep] + (1 if negative else 0))
        stratum[comp] = level
    return {atom: stratum[condensed.graph["mapping"][atom]] for atom in graph.nodes}


def ground(typed: TypedProgram) -> list[GroundProgram]:
    """Ground ``typed`` and slice out one :class:`GroundProgram` per target declaration."""
    grounder = _Grounder(typed)
    rules = grounder.run()
    source_names = set(typed.sources) | set(grounder.virtual)
    strata = _stratify(rules, source_names)

    by_head: dict[str, list[GroundRule]] = {}
    for rule in rules:
        by_head.setdefault(rule.head, []).append(rule)

    def describe(name: str) -> GroundSource:
        if name in grounder.virtual:
            return grounder.virtual[name]
        info = typed.sources[name]
        return GroundSource(name, "source", info.dtype, (info.channel,))

    programs = []
    for decl in typed.targets:
        target = str(decl.atom)
        if target in typed.sources:
            programs.append(GroundProgram(target, decl.channel, [describe(target)], [], {}))
            continue
        relevant: list[GroundRule] = []
        seen = {target}
        stack = [target]
        while stack:
            atom = stack.pop()
            for rule in by_head.get(atom, []):
                relevant.append(rule)
                for dep in (*rule.pos, *rule.neg):
                    if dep not in seen and dep not in source_names:
                        seen.add(dep)
                        stack.append(dep)
        order = {rule: i for i, rule in enumerate(rules)}
        relevant.sort(key=order.__getitem__)
        sources: dict[str, None] = {}
        for rule in relevant:
            for dep in (*rule.pos, *rule.neg):
                if dep in source_names:
                    sources.setdefault(dep)
        programs.append(
            GroundProgram(
                target,
                decl.channel,
                [describe(name) for name in sources],
                relevant,
                {a: strata[a] for a in seen if a in strata},
            )
        )
    return programs


# -- enumeration -------------------------------------------------------------


def _truth_table(i: int, n: int) -> int:
    """Integer whose bit m is bit i of m, for m in [0, 2^n)."""
    total_bits = 1 << n
    if total_bits < 8:
        return sum(1 << m for m in range(total_bits) if m >> i & 1)
    if i < 3:
        byte = sum(1 << b for b in range(8) if b >> i & 1)
        return int.from_bytes(bytes([byte]) * (total_bits // 8), "little")
    half = (1 << i) // 8
    period = b"\x00" * half + b"\xff" * half
    return int.from_bytes(period * (total_bits // (16 * half)), "little")


def enumerate_stable_models(gp: GroundProgram, max_sources: int = DEFAULT_MAX_SOURCES) -> list[StableModel]:
    """All source assignments whose stratified least model derives the target.

    Models are returned in increasing order of their assignment mask.
    """
    atoms = tuple(gp.source_names)
    n = len(atoms)
    if n > max_sources:
        raise CompileError(
            f"model space too large: target {gp.target} depends on {n} source atoms (limit {max_sources})",
            kind="model-space",
        )
    full = (1 << (1 << n)) - 1
    truth: dict[str, int] = {a: _truth_table(i, n) for i, a in enumerate(atoms)}

    by_stratum: dict[int, list[GroundRule]] = {}
    for rule in gp.rules:
        by_stratum.setdefault(gp.strata.get(rule.head, 0), []).append(rule)
    for level in sorted(by_stratum):
        layer = by_stratum[level]
        for rule in layer:
            truth.setdefault(rule.head, 0)
        changed = True
        while changed:
            changed = False
            for rule in layer:
                body = full
                for a in rule.pos:
                    body &= truth.get(a, 0)
                for a in rule.neg:
                    body &= ~truth.get(a, 0)
                new = truth[rule.head] | body
                if new != truth[rule.head]:
                    truth[rule.head] = new
                    changed = True

    target = truth.get(gp.target, 0) & full
    bits = bin(target)[2:][::-1]
    return [StableModel(atoms, m) for m, b in enumerate(bits) if b == "1"]


def stratified_model(gp: GroundProgram, chosen: set[str]) -> set[str]:
    """Derived atoms of the perfect model for one source choice, stratum by stratum."""
    derived: set[str] = set()
    for level in sorted(set(gp.strata.values()) | {0}):
        layer = [r for r in gp.rules if gp.strata.get(r.head, 0) == level]
        frozen = chosen | derived  # lower strata are complete here
        while True:
            known = chosen | derived
            new = {
                r.head
                for r in layer
                if r.head not in derived
                and all(a in known for a in r.pos)
                and not any(a in frozen for a in r.neg)
            }
            if not new:
                break
            derived |= new
    return derived


def is_stable_model(gp: GroundProgram, model: StableModel) -> bool:
    """Gelfond-Lifschitz check of ``model`` and its derived atoms.

    The reduct drops every rule whose negative body meets the interpretation
    and strips the remaining negative literals; the interpretation is stable
    iff the reduct's least model reproduces it and it contains the target.
    """
    chosen = {a for a, v in model.assignment.items() if v}
    interpretation = chosen | stratified_model(gp, chosen)
    if gp.target not in interpretation:
        return False
    reduct = [r for r in gp.rules if not any(a in interpretation for a in r.neg)]
    least = set(chosen)
    while True:
        new = {r.head for r in reduct if r.head not in least and all(a in least for a in r.pos)}
        if not new:
            break
        least |= new
    return least == interpretation


def build_wmc_polynomial(models: Iterable[StableModel], atoms: Iterable[str] | None = None) -> WmcPolynomial:
    models = list(models)
    if atoms is None:
        atoms = models[0].atoms if models else ()
    return WmcPolynomial(tuple(atoms), tuple(m.literals for m in models))


# -- compiled artifact ---------------------------------------------------------


def artifact(gp: GroundProgram, models: list[StableModel]) -> dict:
    """JSON-serialisable description of a compiled target."""
    negated = {a: False for a in gp.source_names}
    for m in models:
        for lit in m.literals:
            negated[lit.atom] |= lit.negated
    return {
        "target": {"atom": gp.target, "channel": gp.target_channel},
        "sources": [
            {
                "atom": s.name,
                "kind": s.kind,
                "type": s.dtype,
                "channels": list(s.channels),
                "negated": negated[s.name],
                "site": s.site.to_json() if s.site else None,
            }
            for s in gp.sources
        ],
        "rules": [{"head": r.head, "pos": list(r.pos), "neg": list(r.neg)} for r in gp.rules],
        "models": [m.bits for m in models],
    }


def polynomial_from_artifact(doc: dict | str) -> WmcPolynomial:
    if isinstance(doc, str):
        doc = json.loads(doc)
    atoms = tuple(s["atom"] for s in doc["sources"])
    terms = tuple(
        tuple(Literal(a, bit == "0") for a, bit in zip(atoms, bits)) for bits in doc["models"]
    )
    return WmcPolynomial(atoms, terms)
