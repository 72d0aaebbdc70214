from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict

from rolesim.core.exceptions import DomainError
from rolesim.models.benchmark import RoleModel
from rolesim.models.graph import DirectedGraph
from rolesim.services import benchgen

RoleGraphBuilder = Callable[[int], DirectedGraph]

COMPLEMENT_PREFIX = "complement:"


class RoleGraphResolutionError(DomainError):
    """Raised when a model spec names neither a registered preset nor a readable file."""


@dataclass(slots=True)
class _PresetFactory:
    identifier: str
    builder: RoleGraphBuilder


class RoleGraphRegistry:
    def __init__(self) -> None:
        self._aliases: Dict[str, _PresetFactory] = {}

    def register(self, alias: str, builder: RoleGraphBuilder) -> None:
        """Register a builder taking the role count ``k``."""

        normalized = alias.strip()
        if not normalized or ":" in normalized:
            raise ValueError("Preset alias must be a non-empty string without ':'")
        self._aliases[normalized] = _PresetFactory(identifier=normalized, builder=builder)

    def aliases(self) -> list[str]:
        return sorted(self._aliases)

    def resolve(self, spec: str) -> DirectedGraph:
        """Turn ``community:3``, ``cycle:5``, ``complement:<spec>`` or a file path into a role graph."""

        if not spec or not isinstance(spec, str):
            raise RoleGraphResolutionError("Model spec must be a non-empty string")
        spec = spec.strip()

        if spec.startswith(COMPLEMENT_PREFIX):
            inner = self.resolve(spec[len(COMPLEMENT_PREFIX):])
            return benchgen.complement_role_graph(inner)

        alias, sep, count = spec.partition(":")
        if sep and alias in self._aliases:
            try:
                k = int(count)
            except ValueError as exc:
                raise RoleGraphResolutionError(
                    f"Role count in '{spec}' is not an integer"
                ) from exc
            return self._aliases[alias].builder(k)

        path = Path(spec)
        if path.is_file():
            return benchgen.preset_role_graph("custom", path=path)

        raise RoleGraphResolutionError(
            f"No role graph preset or file for '{spec}'", presets=self.aliases()
        )


registry = RoleGraphRegistry()
registry.register("community", benchgen.community_role_graph)
registry.register("cycle", benchgen.cycle_role_graph)


def register_role_graph(alias: str, builder: RoleGraphBuilder) -> None:
    """Public helper to register additional presets at runtime."""

    registry.register(alias, builder)


def resolve_role_graph(spec: str) -> DirectedGraph:
    return registry.resolve(spec)


def build_role_model(spec: str, sizes: list[int] | tuple[int, ...] | None, role_size: int) -> RoleModel:
    """Resolve ``spec`` and attach role sizes (``role_size`` each when ``sizes`` is empty)."""

    role_graph = resolve_role_graph(spec)
    if sizes:
        return RoleModel(role_graph=role_graph, sizes=tuple(sizes))
    return RoleModel.uniform(role_graph, role_size)


__all__ = [
    "RoleGraphRegistry",
    "RoleGraphResolutionError",
    "build_role_model",
    "register_role_graph",
    "resolve_role_graph",
]
