"""Neuron evolution: mutation, staged screening and the Pareto front.

The run loop lives in :mod:`arnlab.evolve.run`.
"""

from arnlab.evolve.audit import AuditLog, FrontSnapshot
from arnlab.evolve.candidate import AuditRecord, Candidate
from arnlab.evolve.mutate import Mutation, mutate
from arnlab.evolve.pareto import FrontMember, ParetoFront, pareto_update
from arnlab.evolve.plan import STAGE3_COST_RATIO, StagePlan, StageSpec, stage_cost_multiplier, total_speedup
from arnlab.evolve.staged import evaluate_staged

__all__ = [
    "STAGE3_COST_RATIO",
    "AuditLog",
    "AuditRecord",
    "Candidate",
    "FrontMember",
    "FrontSnapshot",
    "Mutation",
    "ParetoFront",
    "StagePlan",
    "StageSpec",
    "evaluate_staged",
    "mutate",
    "pareto_update",
    "stage_cost_multiplier",
    "total_speedup",
]
