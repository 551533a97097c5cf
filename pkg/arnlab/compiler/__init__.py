"""Neuron program to register bytecode."""

from arnlab.compiler.emit import emit_graph, emit_readable
from arnlab.compiler.kernel import Instr, NeuronKernel, compile_program
from arnlab.compiler.layout import AuxSite, WeightLayout

__all__ = [
    "AuxSite",
    "Instr",
    "NeuronKernel",
    "WeightLayout",
    "compile_program",
    "emit_graph",
    "emit_readable",
]
