from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rolesim.core.exceptions import DomainError
from rolesim.models.graph import Partition


def is_coarsening(fine: Partition, coarse: Partition) -> bool:
    """True when every cluster of ``fine`` falls inside one cluster of ``coarse``."""
    if fine.n != coarse.n:
        return False
    mapped = np.full(fine.k, -1, dtype=np.int64)
    for node, label in enumerate(fine.labels):
        target = coarse.labels[node]
        if mapped[label] == -1:
            mapped[label] = target
        elif mapped[label] != target:
            return False
    return True


@dataclass(frozen=True, slots=True)
class Hierarchy:
    """Nested role assignments; ``levels[0]`` is the finest, ``levels[-1]`` the coarsest."""

    levels: tuple[Partition, ...]

    def __post_init__(self) -> None:
        levels = tuple(self.levels)
        if not levels:
            raise DomainError("hierarchy needs at least one level")
        for finer, coarser in zip(levels, levels[1:]):
            if not is_coarsening(finer, coarser):
                raise DomainError("hierarchy level is not a coarsening of the previous one")
        object.__setattr__(self, "levels", levels)

    @property
    def top(self) -> Partition:
        return self.levels[-1]

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def n(self) -> int:
        return self.levels[0].n

    def cluster_counts(self) -> list[int]:
        return [level.k for level in self.levels]
