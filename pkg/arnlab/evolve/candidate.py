"""Candidates and their audit records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from arnlab.dsl.ast import NeuronProgram
from arnlab.dsl.complexity import DEFAULT_COSTS, SymbolCost, complexity
from arnlab.dsl.printer import pretty_print
from arnlab.evolve.pareto import FrontMember


def candidate_id(generation: int, index: int) -> str:
    return f"g{generation:04d}-c{index:04d}"


@dataclass
class Candidate:
    """A program under evaluation; ``stage_results[k]`` is its stage k+1 loss."""

    candidate_id: str
    program: NeuronProgram
    complexity_bits: float
    generation: int
    index: int
    parent_id: Optional[str] = None
    transformation: str = "seed"
    stage_results: list[float] = field(default_factory=list)
    diagnostic: Optional[str] = None

    @classmethod
    def create(
        cls,
        program: NeuronProgram,
        generation: int,
        index: int,
        parent_id: Optional[str] = None,
        transformation: str = "seed",
        costs: SymbolCost = DEFAULT_COSTS,
    ) -> "Candidate":
        return cls(
            candidate_id=candidate_id(generation, index),
            program=program,
            complexity_bits=complexity(program, costs),
            generation=generation,
            index=index,
            parent_id=parent_id,
            transformation=transformation,
        )

    @property
    def source(self) -> str:
        return pretty_print(self.program)

    @property
    def stages_reached(self) -> int:
        return len(self.stage_results)

    @property
    def evaluation_value(self) -> float:
        """Loss at the deepest stage reached; +inf before any evaluation."""
        return self.stage_results[-1] if self.stage_results else math.inf

    def record(self, loss: float) -> None:
        self.stage_results.append(loss if math.isfinite(loss) else math.inf)

    def front_member(self) -> FrontMember:
        return FrontMember(self.complexity_bits, self.evaluation_value, self.candidate_id, self.source)

    def audit_record(self) -> "AuditRecord":
        return AuditRecord(
            candidate_id=self.candidate_id,
            generation=self.generation,
            parent_id=self.parent_id,
            transformation=self.transformation,
            complexity_bits=self.complexity_bits,
            stage_losses=list(self.stage_results),
            evaluation_value=self.evaluation_value,
            diagnostic=self.diagnostic,
            source=self.source,
        )


class AuditRecord(BaseModel):
    """One line of the evolution audit log."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    candidate_id: str = Field(..., description="gGGGG-cIIII")
    generation: int
    parent_id: Optional[str] = Field(None, description="Parent candidate, None for the seed")
    transformation: str = Field(..., description="Mutation that produced the program")
    complexity_bits: float
    stage_losses: list[float] = Field(default_factory=list, description="Validation loss per stage reached")
    evaluation_value: float
    diagnostic: Optional[str] = None
    source: str = Field(..., description="Pretty-printed program")
