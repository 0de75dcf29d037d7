"""Plain algebraic circuits: DAGs of n-ary plus/times gates over a semiring.

Reactive circuits store each formula in a compact sum-of-products form.  This
module gives the general gate-level view, which is handy for dumping a
formula, cross-checking its value and counting its binary operations without
going through the reactive machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from resin.literal import Literal
from resin.semiring import Semiring


@dataclass(frozen=True)
class Leaf:
    """``kind`` is ``"literal"`` (ref is a Literal), ``"memo"`` (ref is a formula id) or ``"const"``."""

    kind: str
    ref: Any


@dataclass(frozen=True)
class Gate:
    op: str  # "plus" or "times"
    children: tuple[int, ...]


class AlgebraicCircuit:
    def __init__(self) -> None:
        self.nodes: list[Leaf | Gate] = []
        self.root: int | None = None

    def leaf(self, kind: str, ref: Any) -> int:
        if kind not in ("literal", "memo", "const"):
            raise ValueError(f"unknown leaf kind {kind!r}")
        self.nodes.append(Leaf(kind, ref))
        return len(self.nodes) - 1

    def gate(self, op: str, children) -> int:
        children = tuple(children)
        if op not in ("plus", "times"):
            raise ValueError(f"unknown gate {op!r}")
        if not children:
            raise ValueError("a gate needs at least one child")
        # children must already exist, which keeps the node list topologically ordered
        if any(not 0 <= c < len(self.nodes) for c in children):
            raise ValueError(f"gate refers to unknown node among {children}")
        self.nodes.append(Gate(op, children))
        return len(self.nodes) - 1

    def evaluate(
        self,
        sr: Semiring,
        literals: Mapping[Literal, Any],
        memos: Mapping[int, Any] | None = None,
    ) -> Any:
        if self.root is None:
            raise ValueError("circuit has no root")
        memos = memos or {}
        values: list[Any] = []
        for node in self.nodes:
            if isinstance(node, Leaf):
                if node.kind == "literal":
                    values.append(literals[node.ref])
                elif node.kind == "memo":
                    values.append(memos[node.ref])
                else:
                    values.append(node.ref)
            else:
                # binary folds so that the count of applications is explicit
                acc = values[node.children[0]]
                op = sr.plus if node.op == "plus" else sr.times
                for c in node.children[1:]:
                    acc = op(acc, values[c])
                values.append(acc)
        return values[self.root]

    def op_count(self) -> int:
        """Binary gate applications: a gate with k children costs k - 1."""
        return sum(len(n.children) - 1 for n in self.nodes if isinstance(n, Gate))

    def leaves(self) -> list[Leaf]:
        return [n for n in self.nodes if isinstance(n, Leaf)]
