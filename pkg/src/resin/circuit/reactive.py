"""Reactive circuits: memoised formula nodes over signal literals.

Every formula node holds a sum of products.  A product multiplies signal
literals with the memos of child formulas, so the formulas form a DAG below
a single root.  A signal update invalidates the formulas that (transitively)
depend on it; :meth:`ReactiveCircuit.react` re-evaluates exactly those, in
decreasing topological index, so every child memo is fresh when read.

``drop`` moves a set of signals one layer away from the root and ``lift``
moves them one layer towards it.  Both preserve the root value; affected
memos are refreshed by re-evaluation rather than by dividing the old memo,
which would need multiplicative inverses.
"""

from __future__ import annotations

import math
from typing import Any, Iterable, Mapping

from resin.circuit.algebraic import AlgebraicCircuit
from resin.errors import CircuitError
from resin.grounder import WmcPolynomial
from resin.literal import Literal
from resin.semiring import PROBABILITY, Semiring, literal_weight

# literals and child formula ids multiplied together; both kept sorted
Product = tuple[tuple[Literal, ...], tuple[int, ...]]

ONE: list[Product] = [((), ())]


class UnknownSignalError(CircuitError):
    kind = "unknown-signal"


class UnevaluatedSignalError(CircuitError):
    kind = "unevaluated-signal"


class InvariantError(AssertionError):
    """A structural or evaluation-order invariant of the circuit was violated."""


def _product(lits: Iterable[Literal], refs: Iterable[int]) -> Product:
    return tuple(sorted(lits)), tuple(sorted(refs))


def product_cost(p: Product) -> int:
    return max(len(p[0]) + len(p[1]) - 1, 0)


def formula_cost(products: list[Product]) -> int:
    return sum(product_cost(p) for p in products) + max(len(products) - 1, 0)


class ReactiveCircuit:
    def __init__(self, sr: Semiring = PROBABILITY, signals: Iterable[str] = ()):
        self.sr = sr
        self.signals: set[str] = set(signals)
        self.formulas: dict[int, list[Product]] = {}
        self.root = 0
        self.weights: dict[Literal, Any] = {}
        self.memo: dict[int, Any] = {}
        self._pending: set[int] = set()
        self._next_id = 0
        self.adapt_ops = 0  # operations spent refreshing memos after lift/drop
        self.structure_version = 0

    # -- construction ------------------------------------------------------

    @classmethod
    def from_polynomial(cls, poly: WmcPolynomial, sr: Semiring = PROBABILITY) -> "ReactiveCircuit":
        rc = cls(sr, poly.atoms)
        for term in poly.terms:
            rc.signals.update(lit.atom for lit in term)
        root = rc._new_formula([_product(term, ()) for term in poly.terms])
        rc.root = root
        rc._rebuild()
        rc._pending = set(rc.formulas)
        return rc

    def _new_formula(self, products: list[Product]) -> int:
        fid = self._next_id
        self._next_id += 1
        self.formulas[fid] = products
        return fid

    # -- structure ---------------------------------------------------------

    def _children(self, fid: int) -> list[int]:
        seen: dict[int, None] = {}
        for _, refs in self.formulas[fid]:
            for r in refs:
                seen.setdefault(r)
        return list(seen)

    def _rebuild(self) -> None:
        """Recompute indices, depths, costs and dependency sets from scratch."""
        # reverse postorder of a DFS from the root; children are pushed in
        # reverse so that earlier children receive smaller indices
        post: list[int] = []
        visited: set[int] = {self.root}
        stack: list[tuple[int, Iterable[int]]] = [(self.root, iter(reversed(self._children(self.root))))]
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                stack.pop()
                post.append(node)
            elif child not in visited:
                visited.add(child)
                stack.append((child, iter(reversed(self._children(child)))))
        self.topo: list[int] = post[::-1]
        self.index: dict[int, int] = {f: i for i, f in enumerate(self.topo)}

        self.parents: dict[int, set[int]] = {f: set() for f in self.topo}
        self.occurrences: dict[str, set[int]] = {}
        for f in self.topo:
            for lits, refs in self.formulas[f]:
                for r in refs:
                    self.parents[r].add(f)
                for lit in lits:
                    self.occurrences.setdefault(lit.atom, set()).add(f)

        self.depth: dict[int, int] = {f: 0 for f in self.topo}
        for f in self.topo:
            for c in self._children(f):
                self.depth[c] = max(self.depth[c], self.depth[f] + 1)

        self.omega: dict[int, int] = {f: formula_cost(self.formulas[f]) for f in self.topo}
        self._dep: dict[str, list[int]] = {}
        self.structure_version += 1

    def ancestors(self, fids: Iterable[int]) -> set[int]:
        """``fids`` together with every formula above them."""
        out = set(fids)
        stack = list(out)
        while stack:
            for p in self.parents[stack.pop()]:
                if p not in out:
                    out.add(p)
                    stack.append(p)
        return out

    def dep(self, atom: str) -> list[int]:
        """Formula ids whose memo depends on ``atom``, sorted by descending index."""
        if atom not in self.signals:
            raise UnknownSignalError(f"unknown signal {atom!r}")
        cached = self._dep.get(atom)
        if cached is None:
            cached = sorted(self.ancestors(self.occurrences.get(atom, ())), key=self.index.__getitem__, reverse=True)
            self._dep[atom] = cached
        return cached

    def signal_depth(self, atom: str) -> int | None:
        """Smallest depth of a formula holding a literal of ``atom``; None if absent."""
        occ = self.occurrences.get(atom)
        if not occ:
            return None
        return min(self.depth[f] for f in occ)

    @property
    def Omega(self) -> int:
        return sum(self.omega.values())

    @property
    def memo_nodes(self) -> int:
        return len(self.formulas)

    @property
    def layers(self) -> int:
        return max(self.depth.values()) + 1

    def literals(self) -> set[Literal]:
        return {lit for prods in self.formulas.values() for lits, _ in prods for lit in lits}

    # -- weights and evaluation ------------------------------------------------

    def set_weight(self, lit: Literal, value: Any) -> None:
        if lit.atom not in self.signals:
            raise UnknownSignalError(f"unknown signal {lit.atom!r}")
        self.weights[lit] = value

    def set_signal(self, atom: str, value: Any, negative: Any = None) -> None:
        """Set the weight of ``atom`` and of its negation.

        The negative weight defaults to the semiring complement; it is only
        required when the circuit actually contains the negative literal.
        """
        if atom not in self.signals:
            raise UnknownSignalError(f"unknown signal {atom!r}")
        self.weights[Literal(atom, False)] = value
        if negative is None:
            if self.sr.complement is None and Literal(atom, True) not in self.literals_cache():
                return
            negative = literal_weight(self.sr, value, True)
        self.weights[Literal(atom, True)] = negative

    def literals_cache(self) -> set[Literal]:
        if getattr(self, "_lit_version", None) != self.structure_version:
            self._lit_cache = self.literals()
            self._lit_version = self.structure_version
        return self._lit_cache

    def ready(self) -> bool:
        """True when every literal in the circuit has a weight."""
        return all(lit in self.weights for lit in self.literals_cache())

    def _eval(self, fid: int) -> Any:
        sr, w, m = self.sr, self.weights, self.memo
        try:
            return sr.sum(
                sr.prod([*(w[lit] for lit in lits), *(m[r] for r in refs)]) for lits, refs in self.formulas[fid]
            )
        except KeyError as exc:
            key = exc.args[0]
            if isinstance(key, Literal):
                raise UnevaluatedSignalError(f"no weight for signal literal {key} of {key.atom!r}") from None
            raise InvariantError(f"formula f{self.index[fid]} read child f{self.index.get(key)} without a memo") from None

    def evaluate_full(self, weights: Mapping[Literal, Any] | None = None) -> Any:
        """Evaluate every formula bottom-up, refreshing all memos."""
        if weights is not None:
            for lit, value in weights.items():
                self.set_weight(lit, value)
        for fid in reversed(self.topo):
            self.memo[fid] = self._eval(fid)
        self._pending.clear()
        return self.memo[self.root]

    @property
    def value(self) -> Any:
        return self.memo.get(self.root)

    # -- reactive evaluation ---------------------------------------------------

    def invalidate(self, atom: str) -> list[int]:
        self._pending.update(self.dep(atom))
        return self.queue

    @property
    def queue(self) -> list[int]:
        """Pending formula indices, highest first."""
        return sorted((self.index[f] for f in self._pending), reverse=True)

    def update(self, atom: str, value: Any, negative: Any = None) -> None:
        self.set_signal(atom, value, negative)
        self.invalidate(atom)

    def react(self) -> tuple[Any, int]:
        """Drain the invalidation queue; return the root memo and the ops spent."""
        ops = 0
        order = sorted(self._pending, key=self.index.__getitem__, reverse=True)
        pending = self._pending
        for fid in order:
            for r in self._children(fid):
                if r in pending:
                    raise InvariantError(f"f{self.index[fid]} evaluated before its child f{self.index[r]}")
            self.memo[fid] = self._eval(fid)
            ops += self.omega[fid]
            pending.discard(fid)
        return self.memo.get(self.root), ops

    # -- adaptation ------------------------------------------------------------

    def _check_signals(self, signals: Iterable[str]) -> set[str]:
        S = set(signals)
        unknown = S - self.signals
        if unknown:
            raise UnknownSignalError(f"unknown signal(s) {', '.join(sorted(unknown))}")
        return S

    def _holding(self, S: set[str]) -> list[int]:
        found: set[int] = set()
        for atom in S:
            found |= self.occurrences.get(atom, set())
        return sorted(found, key=self.index.__getitem__)

    def drop(self, signals: Iterable[str]) -> None:
        """Push every literal of ``signals`` one formula further from the root.

        In each formula, products that mention the signals are grouped by
        their remaining factors; each group becomes ``rest * m`` where the new
        child ``m`` sums the groups' signal parts.
        """
        S = self._check_signals(signals)
        targets = self._holding(S)
        if not targets:
            return
        evaluated = self.value is not None
        changed: set[int] = set()
        for fid in targets:
            layout: list[tuple[bool, Any]] = []
            groups: dict[Product, list[tuple[Literal, ...]]] = {}
            for lits, refs in self.formulas[fid]:
                part = tuple(lit for lit in lits if lit.atom in S)
                if not part:
                    layout.append((False, (lits, refs)))
                    continue
                key = (tuple(lit for lit in lits if lit.atom not in S), refs)
                if key not in groups:
                    groups[key] = []
                    layout.append((True, key))
                groups[key].append(part)
            products: list[Product] = []
            for grouped, item in layout:
                if not grouped:
                    products.append(item)
                    continue
                rest, refs = item
                child = self._new_formula([(part, ()) for part in groups[item]])
                changed.add(child)
                products.append(_product(rest, (*refs, child)))
            self.formulas[fid] = products
            changed.add(fid)
        self._restructure(changed, evaluated)

    def lift(self, signals: Iterable[str]) -> None:
        """Pull every literal of ``signals`` one formula closer to the root.

        A formula is split by the signals' part of each product into
        ``sum_s s * r_s``; each reference to it is replaced by that sum, with
        residuals equal to one inlined.  Lifting out of the root creates a
        new root.
        """
        S = self._check_signals(signals)
        targets = self._holding(S)
        if not targets:
            return
        evaluated = self.value is not None
        changed: set[int] = set()
        # child -> formulas that referenced it at some point during this lift
        referrers: dict[int, set[int]] = {}

        def note(f: int) -> None:
            for _, refs in self.formulas[f]:
                for r in refs:
                    referrers.setdefault(r, set()).add(f)

        for f in self.formulas:
            note(f)
        for fid in targets:
            groups: dict[tuple[Literal, ...], list[Product]] = {}
            for lits, refs in self.formulas[fid]:
                sigma = tuple(lit for lit in lits if lit.atom in S)
                rest = tuple(lit for lit in lits if lit.atom not in S)
                groups.setdefault(sigma, []).append((rest, refs))
            # residual formula per signal part; None stands for the constant one
            split: list[tuple[tuple[Literal, ...], int | None]] = []
            reused = False
            for sigma, residual in groups.items():
                if residual == ONE:
                    split.append((sigma, None))
                elif not reused:
                    self.formulas[fid] = residual
                    split.append((sigma, fid))
                    reused = True
                else:
                    new = self._new_formula(residual)
                    note(new)
                    split.append((sigma, new))
            changed.update(r for _, r in split if r is not None)

            def expand(refs_without: tuple[int, ...], lits: tuple[Literal, ...]) -> list[Product]:
                return [
                    _product((*lits, *sigma), refs_without if r is None else (*refs_without, r))
                    for sigma, r in split
                ]

            if fid == self.root:
                self.root = self._new_formula(expand((), ()))
                note(self.root)
                changed.add(self.root)
                continue
            for parent in sorted(referrers.get(fid, ())):
                if not any(fid in refs for _, refs in self.formulas[parent]):
                    continue
                products: list[Product] = []
                for lits, refs in self.formulas[parent]:
                    k = refs.count(fid)
                    if not k:
                        products.append((lits, refs))
                        continue
                    # fid may be reused as a residual, so expand each original occurrence once
                    partial = [(lits, tuple(r for r in refs if r != fid))]
                    for _ in range(k):
                        partial = [q for l, rf in partial for q in expand(rf, l)]
                    products.extend(partial)
                self.formulas[parent] = products
                note(parent)
                changed.add(parent)
        self._restructure(changed, evaluated)

    def _restructure(self, changed: set[int], evaluated: bool) -> None:
        mapping = self._dedupe()
        changed = {mapping.get(f, f) for f in changed}
        self._collect_garbage()
        self._rebuild()
        changed &= set(self.formulas)
        for fid in set(self.memo) - set(self.formulas):
            del self.memo[fid]
        self._pending = {mapping.get(f, f) for f in self._pending} & set(self.formulas)
        self._pending |= self.ancestors(changed)
        self.check_invariants()
        if evaluated and self.ready():
            _, ops = self.react()
            self.adapt_ops += ops

    def _dedupe(self) -> dict[int, int]:
        """Merge structurally identical formulas, children before parents."""
        mapping: dict[int, int] = {}
        table: dict[tuple, int] = {}
        for fid in reversed(self._reachable_topo()):
            prods = self.formulas[fid]
            if any(r in mapping for _, refs in prods for r in refs):
                prods = [_product(lits, (mapping.get(r, r) for r in refs)) for lits, refs in prods]
                self.formulas[fid] = prods
            key = tuple(sorted(prods))
            if key in table and fid != self.root:
                mapping[fid] = table[key]
            else:
                table.setdefault(key, fid)
        return mapping

    def _reachable_topo(self) -> list[int]:
        post: list[int] = []
        visited = {self.root}
        stack = [(self.root, iter(self._children(self.root)))]
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                stack.pop()
                post.append(node)
            elif child not in visited:
                visited.add(child)
                stack.append((child, iter(self._children(child))))
        return post[::-1]

    def _collect_garbage(self) -> None:
        live = set(self._reachable_topo())
        for fid in list(self.formulas):
            if fid not in live:
                del self.formulas[fid]

    # -- checks and metrics ----------------------------------------------------

    def check_invariants(self) -> None:
        if self.root not in self.formulas:
            raise InvariantError("root formula missing")
        for fid, prods in self.formulas.items():
            if fid != self.root and not self.parents.get(fid):
                raise InvariantError(f"formula {fid} is unreachable from the root")
            if fid != self.root and not prods:
                raise InvariantError(f"formula f{self.index[fid]} has no products")
            for _, refs in prods:
                for r in refs:
                    if r not in self.formulas:
                        raise InvariantError(f"formula f{self.index[fid]} refers to missing formula {r}")
                    # ancestors carry smaller indices than their descendants
                    if self.index[fid] >= self.index[r]:
                        raise InvariantError(f"index order violated on edge f{self.index[fid]} -> f{self.index[r]}")
        if self.index[self.root] != 0:
            raise InvariantError("root must have index 0")

    def rates(self, focs: Mapping[str, float]) -> tuple[float, float, float]:
        """Naive and reactive operation rates and their ratio for signal rates ``focs`` (Hz)."""
        for atom, lam in focs.items():
            if lam < 0:
                raise ValueError(f"negative rate {lam} for signal {atom!r}")
            if atom not in self.signals:
                raise UnknownSignalError(f"unknown signal {atom!r}")
        # termwise lam*w_a <= lam*Omega, so correctly rounded sums keep rho_rc <= rho_max exactly
        rho_max = math.fsum(lam * self.Omega for lam in focs.values())
        rho_rc = math.fsum(lam * sum(self.omega[f] for f in self.dep(a)) for a, lam in focs.items())
        if rho_rc == 0:
            if rho_max != 0:
                raise InvariantError("reactive rate vanished while naive rate is positive")
            return rho_max, rho_rc, 1.0
        return rho_max, rho_rc, rho_max / rho_rc

    def label(self, fid: int) -> str:
        return f"f{self.index[fid]}"

    def formula_ac(self, fid: int) -> AlgebraicCircuit:
        """Gate-level view of one formula; child memos appear as memo leaves."""
        ac = AlgebraicCircuit()
        prods = self.formulas[fid]
        if not prods:
            ac.root = ac.leaf("const", self.sr.zero)
            return ac
        terms = []
        for lits, refs in prods:
            leaves = [ac.leaf("literal", lit) for lit in lits] + [ac.leaf("memo", r) for r in refs]
            if not leaves:
                leaves = [ac.leaf("const", self.sr.one)]
            terms.append(ac.gate("times", leaves))
        ac.root = ac.gate("plus", terms)
        return ac

    def dump(self) -> str:
        """One line per node: id, kind, children and cost."""
        lines = []
        for fid in self.topo:
            children = ",".join(self.label(c) for c in sorted(self._children(fid), key=self.index.__getitem__))
            lits = sorted({lit for lits, _ in self.formulas[fid] for lit in lits})
            body = " + ".join(
                "*".join([*(str(l) for l in lits_), *(self.label(r) for r in refs)]) or "1"
                for lits_, refs in self.formulas[fid]
            ) or "0"
            lines.append(
                f"{self.label(fid)} formula depth={self.depth[fid]} omega={self.omega[fid]} "
                f"children=[{children}] signals=[{','.join(map(str, lits))}] := {body}"
            )
        for atom in sorted(self.signals):
            parents = ",".join(self.label(f) for f in sorted(self.occurrences.get(atom, ()), key=self.index.__getitem__))
            lines.append(f"{atom} signal parents=[{parents}]")
        return "\n".join(lines)
