"""``rolesim`` command line: one binary, one subcommand per pipeline stage.

Results go to files or stdout; diagnostics go to stderr through the
structured logger. Exit codes: 0 ok, 1 IO, 2 usage, 3 numerical.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from collections.abc import Callable, Sequence
from typing import Any

from rolesim import __version__
from rolesim.core.config import get_settings
from rolesim.core.exceptions import EXIT_NUMERICAL, EXIT_OK, handle_error
from rolesim.core.logging import get_logger
from rolesim.models.graph import DenseSymMatrix
from rolesim.pipelines.config import grid_defaults, load_experiment_config, panel_levels
from rolesim.pipelines.experiment import nmi_grid, noise_panel
from rolesim.pipelines.registry import build_role_model
from rolesim.schemas.command import (
    CommandConfig,
    EvaluateConfig,
    ExperimentConfig,
    GenerateConfig,
    PanelConfig,
    RankSweepConfig,
    RolesConfig,
    SimilarityConfig,
)
from rolesim.services import graph_io
from rolesim.services.benchgen import generate
from rolesim.services.evaluation import nmi, rank_sweep
from rolesim.services.role_extraction import cluster, role_similarity, similarity_graph
from rolesim.services.similarity_exact import full_similarity, resolve_beta
from rolesim.services.similarity_lowrank import lowrank_similarity, materialize

logger = get_logger("rolesim.cli")


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        graph_io.save_report(text, path)


def _convergence_path(out: Path) -> Path:
    return out.with_name(f"{out.name}.convergence.csv")


def cmd_generate(config: GenerateConfig) -> int:
    model = build_role_model(config.model, config.sizes, role_size=1)
    instance = generate(model, config.p_in, config.p_out, seed=config.seed)
    prefix = config.out_prefix
    graph_io.save_edge_list(instance.graph, prefix.with_name(f"{prefix.name}.edges.tsv"))
    graph_io.save_partition(instance.truth, prefix.with_name(f"{prefix.name}.truth.tsv"))
    print(instance.graph.edge_count)
    return EXIT_OK


def cmd_similarity(config: SimilarityConfig) -> int:
    graph = graph_io.load_edge_list(config.graph)
    scaling = resolve_beta(graph, config.beta, force=config.force)
    if config.rank is None:
        matrix, report = full_similarity(graph, scaling, config.tol, config.max_iter)
        graph_io.save_matrix(matrix, config.out)
    else:
        factor, report = lowrank_similarity(graph, config.rank, scaling, config.tol, config.max_iter)
        graph_io.save_factor(factor, config.out)
        if config.materialize is not None:
            graph_io.save_matrix(DenseSymMatrix(values=materialize(factor)), config.materialize)
    graph_io.save_convergence(report, _convergence_path(config.out))

    if not report.converged:
        logger.error(
            "Similarity did not converge; outputs are flagged as partial",
            iterations=report.iterations,
            residual=report.final_residual,
            out=str(config.out),
        )
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_roles(config: RolesConfig) -> int:
    graph = graph_io.load_edge_list(config.graph)
    similarity, report = role_similarity(
        graph, r=config.rank, beta=config.beta, full=config.full, force=config.force
    )
    hierarchy = cluster(similarity_graph(similarity), resolution=config.resolution, seed=config.seed)
    index = graph_io.save_hierarchy(hierarchy, config.out_prefix, converged=report.converged)
    logger.info("Wrote role hierarchy", index=str(index), levels=hierarchy.depth)
    print("level\tn_clusters")
    for level, count in enumerate(hierarchy.cluster_counts()):
        print(f"{level}\t{count}")

    if not report.converged:
        logger.error(
            "Roles were clustered from a non-converged similarity; outputs are flagged as partial",
            iterations=report.iterations,
            residual=report.final_residual,
            index=str(index),
        )
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_ranksweep(config: RankSweepConfig) -> int:
    graph = graph_io.load_edge_list(config.graph)
    report = rank_sweep(graph, config.rmax, beta=config.beta, tol=config.tol)
    _emit(report.to_csv(), config.out)
    return EXIT_OK


def cmd_evaluate(config: EvaluateConfig) -> int:
    score = nmi(graph_io.load_partition(config.a), graph_io.load_partition(config.b))
    print(f"{score:.6f}")
    return EXIT_OK


def cmd_experiment(config: ExperimentConfig) -> int:
    model = build_role_model(config.model, config.sizes, config.role_size)
    grid = nmi_grid(
        model,
        step=config.step,
        realizations=config.realizations,
        r=config.rank,
        seed_base=config.seed,
        jobs=config.jobs,
    )
    _emit(grid.to_csv(), config.out)
    return EXIT_OK


def cmd_panel(config: PanelConfig) -> int:
    experiments = load_experiment_config(config.config)
    model = build_role_model(config.model, config.sizes, config.role_size)
    panel = noise_panel(
        model, panel_levels(experiments), r=config.rank, seed=config.seed, r_max=config.rmax
    )
    _emit(panel.to_csv(), config.out)
    return EXIT_OK


COMMANDS: dict[str, tuple[type[CommandConfig], Callable[[Any], int]]] = {
    "generate": (GenerateConfig, cmd_generate),
    "similarity": (SimilarityConfig, cmd_similarity),
    "roles": (RolesConfig, cmd_roles),
    "ranksweep": (RankSweepConfig, cmd_ranksweep),
    "evaluate": (EvaluateConfig, cmd_evaluate),
    "experiment": (ExperimentConfig, cmd_experiment),
    "panel": (PanelConfig, cmd_panel),
}


def _add_beta(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", default="auto", help="Scaling parameter, or 'auto' (default)")


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", help="community:K, cycle:K, complement:<model> or a role-graph file")
    parser.add_argument("--sizes", help="Comma-separated role sizes; defaults to --role-size each")
    parser.add_argument("--role-size", type=int, help="Nodes per role when --sizes is absent")
    parser.add_argument("--rank", type=int, help="Rank of the low-rank pipeline")
    parser.add_argument("--seed", type=int, help="Base seed")
    parser.add_argument("--out", help="Output CSV (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rolesim", description="Role extraction by neighborhood-pattern similarity"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    generate_parser = subparsers.add_parser("generate", help="Sample a block-structured random graph")
    generate_parser.add_argument("--model", required=True)
    generate_parser.add_argument("--sizes", required=True, help="Comma-separated role sizes")
    generate_parser.add_argument("--p-in", type=float, required=True)
    generate_parser.add_argument("--p-out", type=float, required=True)
    generate_parser.add_argument("--seed", type=int, default=0)
    generate_parser.add_argument("--out-prefix", required=True)

    similarity_parser = subparsers.add_parser("similarity", help="Full or low-rank similarity")
    similarity_parser.add_argument("--graph", required=True)
    mode = similarity_parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--rank", type=int)
    mode.add_argument("--full", action="store_true")
    _add_beta(similarity_parser)
    similarity_parser.add_argument("--force", action="store_true", help="Allow beta above the easy bound")
    similarity_parser.add_argument("--tol", type=float)
    similarity_parser.add_argument("--max-iter", type=int)
    similarity_parser.add_argument("--out", required=True)
    similarity_parser.add_argument("--materialize", help="Also write the dense X X^T of a low-rank run")

    roles_parser = subparsers.add_parser("roles", help="Extract a role hierarchy")
    roles_parser.add_argument("--graph", required=True)
    roles_mode = roles_parser.add_mutually_exclusive_group()
    roles_mode.add_argument("--rank", type=int)
    roles_mode.add_argument("--full", action="store_true")
    _add_beta(roles_parser)
    roles_parser.add_argument("--force", action="store_true")
    roles_parser.add_argument("--resolution", type=float, default=1.0)
    roles_parser.add_argument("--seed", type=int, default=0)
    roles_parser.add_argument("--out-prefix", required=True)

    sweep_parser = subparsers.add_parser("ranksweep", help="Low-rank error versus rank, with knee")
    sweep_parser.add_argument("--graph", required=True)
    sweep_parser.add_argument("--rmax", type=int, required=True)
    _add_beta(sweep_parser)
    sweep_parser.add_argument("--tol", type=float)
    sweep_parser.add_argument("--out")

    evaluate_parser = subparsers.add_parser("evaluate", help="NMI between two partition files")
    evaluate_parser.add_argument("--a", required=True)
    evaluate_parser.add_argument("--b", required=True)

    experiment_parser = subparsers.add_parser("experiment", help="Mean NMI over the (p_in, p_out) grid")
    _add_model(experiment_parser)
    experiment_parser.add_argument("--step", type=float)
    experiment_parser.add_argument("--realizations", type=int)
    experiment_parser.add_argument("--jobs", type=int, help="Worker processes (ROLESIM_JOBS fallback)")

    panel_parser = subparsers.add_parser("panel", help="Knee and per-level NMI at fixed noise levels")
    _add_model(panel_parser)
    panel_parser.add_argument("--rmax", type=int)
    panel_parser.add_argument("--config", help="Experiments YAML with the panel noise levels")

    return parser


def _config_values(args: argparse.Namespace) -> dict[str, Any]:
    values = {key: value for key, value in vars(args).items() if value is not None}
    if args.command in {"experiment", "panel"}:
        config_path = Path(values["config"]) if "config" in values else None
        experiments = load_experiment_config(config_path)
        if args.command == "experiment":
            section = grid_defaults(experiments)
            section.setdefault("jobs", get_settings().jobs)
        else:
            section = dict(experiments.get("panel", {}) or {})
            section.pop("levels", None)
        values = {**section, **values}
    return values


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config_cls, handler = COMMANDS[args.command]
    try:
        config = config_cls(**_config_values(args))
        logger.debug("Running command", command=args.command)
        return handler(config)
    except Exception as exc:
        return handle_error(exc)


if __name__ == "__main__":
    raise SystemExit(main())
