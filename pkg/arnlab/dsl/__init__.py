"""Neuron program language: syntax, types and size."""

from arnlab.dsl.ast import NeuronProgram, node_count
from arnlab.dsl.complexity import DEFAULT_COSTS, SymbolCost, complexity
from arnlab.dsl.parser import parse
from arnlab.dsl.printer import pretty_print
from arnlab.dsl.typecheck import TypedProgram, typecheck

__all__ = [
    "DEFAULT_COSTS",
    "NeuronProgram",
    "SymbolCost",
    "TypedProgram",
    "complexity",
    "node_count",
    "parse",
    "pretty_print",
    "typecheck",
]
