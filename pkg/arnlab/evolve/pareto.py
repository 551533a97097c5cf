"""Complexity / validation-loss Pareto front."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional


@dataclass(frozen=True)
class FrontMember:
    complexity_bits: float
    loss: float
    candidate_id: str
    source: str

    def dominates(self, complexity_bits: float, loss: float) -> bool:
        """No worse on both objectives; equal points count as dominated."""
        return self.complexity_bits <= complexity_bits and self.loss <= loss


@dataclass(frozen=True)
class ParetoFront:
    """Members sorted by complexity, with strictly decreasing loss."""

    members: tuple[FrontMember, ...] = ()

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def is_dominated(self, complexity_bits: float, loss: float) -> bool:
        return any(m.dominates(complexity_bits, loss) for m in self.members)

    def update(self, member: FrontMember) -> "ParetoFront":
        """Insert ``member`` unless dominated and drop what it dominates."""
        if not (math.isfinite(member.loss) and math.isfinite(member.complexity_bits)):
            return self
        if self.is_dominated(member.complexity_bits, member.loss):
            return self
        kept = [m for m in self.members if not member.dominates(m.complexity_bits, m.loss)]
        kept.append(member)
        kept.sort(key=lambda m: m.complexity_bits)
        return ParetoFront(tuple(kept))

    def best(self) -> Optional[FrontMember]:
        """The member with the lowest validation loss: the most complex one."""
        return self.members[-1] if self.members else None

    def is_valid(self) -> bool:
        pairs = list(zip(self.members, self.members[1:]))
        return all(a.complexity_bits < b.complexity_bits and a.loss > b.loss for a, b in pairs)


def pareto_update(front: ParetoFront, member: FrontMember) -> ParetoFront:
    return front.update(member)


def front_of(members: Iterable[FrontMember]) -> ParetoFront:
    front = ParetoFront()
    for member in members:
        front = pareto_update(front, member)
    return front
