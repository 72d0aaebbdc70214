from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from rolesim.core.exceptions import DomainError
from rolesim.models.graph import DirectedGraph, Partition
from rolesim.schemas.benchmark import GenerationParams


@dataclass(frozen=True, slots=True, eq=False)
class RoleModel:
    """A binary role graph G_B over k roles plus the number of nodes per role."""

    role_graph: DirectedGraph
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(size) for size in self.sizes)
        if len(sizes) != self.role_graph.n:
            raise DomainError(
                "one size per role is required", roles=self.role_graph.n, sizes=len(sizes)
            )
        if any(size < 1 for size in sizes):
            raise DomainError("role sizes must be positive", sizes=list(sizes))
        if not np.all(np.isin(self.role_graph.weight, (0.0, 1.0))):
            raise DomainError("role graph weights must be binary")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def uniform(cls, role_graph: DirectedGraph, role_size: int) -> RoleModel:
        return cls(role_graph=role_graph, sizes=(role_size,) * role_graph.n)

    @property
    def k(self) -> int:
        return self.role_graph.n

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def role_labels(self) -> npt.NDArray[np.int64]:
        return np.repeat(np.arange(self.k, dtype=np.int64), self.sizes)

    def block_matrix(self) -> npt.NDArray[np.bool_]:
        return self.role_graph.to_dense() > 0


@dataclass(frozen=True, slots=True)
class GeneratedInstance:
    graph: DirectedGraph
    truth: Partition
    params: GenerationParams

    def __post_init__(self) -> None:
        if self.graph.n != self.truth.n:
            raise DomainError(
                "truth partition size differs from graph", n=self.graph.n, truth=self.truth.n
            )
