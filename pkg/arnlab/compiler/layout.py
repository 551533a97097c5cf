"""Static weight layout of a compiled neuron layer."""

from __future__ import annotations

from dataclasses import dataclass

from arnlab.dsl.ast import N_MAPPINGS

SOURCES = ("bias", "x", "y", "s0")


@dataclass(frozen=True)
class AuxSite:
    """An auxiliary weight vector: one per (mapping, cons site)."""

    mapping: int
    site: int


@dataclass(frozen=True)
class WeightLayout:
    """Shapes of the layer weights.

    For every mapping i: input matrix U_i (l x n_in), hollow recurrent
    matrix W_i (l x l), hollow peep matrix P_i (l x l) and bias b_i (l).
    The five mappings are stacked along the first axis.  Auxiliary vectors
    a_k (l) are stacked in ``aux_sites`` order.
    """

    nodes: int
    n_in: int
    mappings: tuple[int, ...]
    aux_sites: tuple[AuxSite, ...]

    @property
    def n_aux(self) -> int:
        return len(self.aux_sites)

    def shapes(self) -> dict[str, tuple[int, ...]]:
        l = self.nodes
        return {
            "U": (N_MAPPINGS, l, self.n_in),
            "W": (N_MAPPINGS, l, l),
            "P": (N_MAPPINGS, l, l),
            "b": (N_MAPPINGS, l),
            "aux": (self.n_aux, l),
        }

    def with_size(self, nodes: int, n_in: int) -> "WeightLayout":
        return WeightLayout(nodes, n_in, self.mappings, self.aux_sites)
