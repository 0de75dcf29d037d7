"""Algebraic and reactive circuits."""

from resin.circuit.algebraic import AlgebraicCircuit, Gate, Leaf
from resin.circuit.reactive import (
    InvariantError,
    ReactiveCircuit,
    UnevaluatedSignalError,
    UnknownSignalError,
    formula_cost,
)

__all__ = [
    "AlgebraicCircuit",
    "Gate",
    "InvariantError",
    "Leaf",
    "ReactiveCircuit",
    "UnevaluatedSignalError",
    "UnknownSignalError",
    "formula_cost",
]
