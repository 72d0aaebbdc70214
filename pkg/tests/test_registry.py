from __future__ import annotations

import pytest

from rolesim.core.exceptions import DomainError
from rolesim.models.graph import DirectedGraph
from rolesim.pipelines.registry import (
    RoleGraphRegistry,
    RoleGraphResolutionError,
    build_role_model,
    register_role_graph,
    registry,
    resolve_role_graph,
)


def test_presets_resolve():
    assert resolve_role_graph("community:3").edges == [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]
    assert resolve_role_graph(" cycle:2 ").edges == [(0, 1, 1.0), (1, 0, 1.0)]


def test_complement_prefix_nests():
    complement = resolve_role_graph("complement:community:2")
    assert complement.edges == [(0, 1, 1.0), (1, 0, 1.0)]
    assert resolve_role_graph("complement:complement:cycle:3") == resolve_role_graph("cycle:3")


def test_file_specs_load_role_graphs(tmp_path):
    path = tmp_path / "roles.tsv"
    path.write_text("0\t1\n1\t2\n")
    assert resolve_role_graph(str(path)).n == 3


@pytest.mark.parametrize("spec", ["", "star:3", "cycle:x", "cycle:0"])
def test_bad_specs_are_domain_errors(spec):
    with pytest.raises(DomainError):
        resolve_role_graph(spec)


def test_unknown_alias_lists_presets():
    with pytest.raises(RoleGraphResolutionError) as excinfo:
        resolve_role_graph("star:3")
    assert excinfo.value.details["presets"] == ["community", "cycle"]


def test_runtime_registration(monkeypatch):
    monkeypatch.setattr(registry, "_aliases", dict(registry._aliases))
    register_role_graph("chain", lambda k: DirectedGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)]))
    assert resolve_role_graph("chain:3").edge_count == 2


def test_aliases_must_be_plain_names():
    local = RoleGraphRegistry()
    with pytest.raises(ValueError):
        local.register("a:b", lambda k: DirectedGraph.from_edges(k, []))
    with pytest.raises(ValueError):
        local.register("  ", lambda k: DirectedGraph.from_edges(k, []))


def test_build_role_model_sizes():
    assert build_role_model("cycle:3", [1, 2, 3], role_size=9).sizes == (1, 2, 3)
    assert build_role_model("cycle:3", None, role_size=9).sizes == (9, 9, 9)
    with pytest.raises(DomainError):
        build_role_model("cycle:3", [1, 2], role_size=9)
