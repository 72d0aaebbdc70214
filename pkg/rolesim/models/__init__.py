from rolesim.models.benchmark import GeneratedInstance, RoleModel
from rolesim.models.graph import DenseSymMatrix, DirectedGraph, Partition
from rolesim.models.roles import Hierarchy
from rolesim.models.similarity import ConvergenceReport, LowRankFactor, ScalingParameter

__all__ = [
    "ConvergenceReport",
    "DenseSymMatrix",
    "DirectedGraph",
    "GeneratedInstance",
    "Hierarchy",
    "LowRankFactor",
    "Partition",
    "RoleModel",
    "ScalingParameter",
]
