"""Command-line entry point for portgnn."""

import json
import sys
from typing import List, Optional, Tuple

import click

from .controllers.experiment_controller import ExperimentController, ExperimentSpec
from .controllers.simulator import run_rounds, verify_single_leaf
from .errors import PortGNNError
from .models.coloring import Coloring, two_coloring, weak_two_coloring
from .models.features import DEGREE_2COLOR, DEGREE_WEAK2, node_features
from .models.gnn import GNNModel, ModelKind
from .models.graph import Graph
from .models.node_program import (
    NodeProgram,
    constant_program,
    identity_program,
    single_leaf_program,
    wrap_gnn_as_program,
)
from .models.oracles import METHODS, Problem, solve
from .models.port_numbering import PortNumbering, consistent_port_numbering, shuffled_port_numbering
from .utils.file_utils import (
    build_header,
    graph_to_dict,
    read_graph_file,
    read_json,
    write_json,
)
from .utils.generators import GENERATOR_KINDS, generate
from .utils.logging_utils import configure_logging
from .version import get_version

PROGRAMS = ("single_leaf", "constant", "identity", "gnn:<checkpoint>")


def _usage(exc: Exception) -> click.UsageError:
    return click.UsageError(str(exc))


def _emit(data: dict, out: Optional[str]) -> None:
    """Write JSON to `out`, or print it when no file is given."""
    if out:
        write_json(out, data)
    else:
        click.echo(json.dumps(data, indent=2, sort_keys=True))


def _load_graph(path: str):
    try:
        return read_graph_file(path)
    except PortGNNError as exc:
        raise _usage(exc)


def parse_ports(g: Graph, spec: Optional[str], stored: Optional[PortNumbering] = None) -> Tuple[PortNumbering, str]:
    """Resolve a `--ports` value.

    `canonical` numbers ports in canonical edge order, `shuffle:<seed>`
    samples a consistent numbering; with no value the numbering stored in
    the graph file is used, falling back to canonical.
    """
    if spec is None:
        if stored is not None:
            return stored, "file"
        return consistent_port_numbering(g), "canonical"
    if spec == "canonical":
        return consistent_port_numbering(g), spec
    if spec.startswith("shuffle:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise click.BadParameter(f"bad shuffle seed in {spec!r}", param_hint="--ports")
        return shuffled_port_numbering(g, seed), spec
    raise click.BadParameter(f"expected canonical or shuffle:<seed>, got {spec!r}", param_hint="--ports")


def _gnn_program(checkpoint: str, g: Graph, coloring: Optional[Coloring]) -> Tuple[NodeProgram, List]:
    model = GNNModel.from_checkpoint(read_json(checkpoint))
    if model.kind is not ModelKind.VVC:
        raise click.BadParameter(
            f"{checkpoint} holds a {model.kind.value} model; only vvc models run as programs",
            param_hint="PROGRAM",
        )
    if model.features == DEGREE_WEAK2 and coloring is None:
        coloring = weak_two_coloring(g)
    elif model.features == DEGREE_2COLOR and coloring is None:
        coloring = two_coloring(g)
    x = node_features(g, model.features, model.delta, coloring)
    return wrap_gnn_as_program(model), [x[v - 1] for v in g.nodes]


def resolve_program(name: str, g: Graph, coloring: Optional[Coloring]) -> Tuple[NodeProgram, Optional[List]]:
    """Look up a registered program and the node inputs it needs."""
    if name == "single_leaf":
        return single_leaf_program(), None
    if name == "constant":
        return constant_program(), None
    if name == "identity":
        return identity_program(), None
    if name.startswith("gnn:"):
        return _gnn_program(name[len("gnn:"):], g, coloring)
    raise click.BadParameter(f"unknown program {name!r}, expected one of {', '.join(PROGRAMS)}", param_hint="PROGRAM")


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
@click.version_option(get_version(), prog_name="portgnn")
def cli(verbose: int) -> None:
    """Port-numbered GNNs, local algorithms and exact combinatorial oracles."""
    configure_logging(verbose)


@cli.command()
@click.argument("kind", type=click.Choice(GENERATOR_KINDS))
@click.argument("params", nargs=-1, type=int)
@click.option("--seed", default=0, show_default=True, help="Seed for random families.")
@click.option("--ports", "ports_spec", default=None, help="Store ports: canonical or shuffle:<seed>.")
@click.option("--coloring", "with_coloring", is_flag=True, help="Store a weak 2-coloring.")
@click.option("-o", "--out", default=None, help="Output graph file (stdout if omitted).")
def gen(kind: str, params: Tuple[int, ...], seed: int, ports_spec: Optional[str], with_coloring: bool, out: Optional[str]) -> None:
    """Generate a graph: star K, path N, cycle N, random_bounded N DELTA,
    random_bipartite A B DELTA."""
    try:
        g = generate(kind, params, seed)
        coloring = weak_two_coloring(g) if with_coloring else None
    except PortGNNError as exc:
        raise _usage(exc)
    ports = parse_ports(g, ports_spec)[0] if ports_spec else None
    header = build_header(seed, {"command": "gen", "kind": kind, "params": list(params), "ports": ports_spec})
    _emit(graph_to_dict(g, coloring, ports, header), out)


@cli.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--ports", "ports_spec", default="canonical", show_default=True, help="canonical or shuffle:<seed>.")
@click.option("-o", "--out", default=None, help="Output graph file (stdout if omitted).")
def ports(graph_file: str, ports_spec: str, out: Optional[str]) -> None:
    """Attach a consistent port numbering to a graph file."""
    loaded = _load_graph(graph_file)
    p, label = parse_ports(loaded.graph, ports_spec)
    header = build_header(None, {"command": "ports", "graph": loaded.graph.to_dict(), "ports": label})
    _emit(graph_to_dict(loaded.graph, loaded.coloring, p, header), out)


@cli.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--proper", is_flag=True, help="Proper 2-coloring instead of a weak one.")
@click.option("-o", "--out", default=None, help="Output graph file (stdout if omitted).")
def color(graph_file: str, proper: bool, out: Optional[str]) -> None:
    """Attach a weak (or proper) 2-coloring to a graph file."""
    loaded = _load_graph(graph_file)
    try:
        coloring = two_coloring(loaded.graph) if proper else weak_two_coloring(loaded.graph)
    except PortGNNError as exc:
        raise _usage(exc)
    header = build_header(None, {"command": "color", "graph": loaded.graph.to_dict(), "proper": proper})
    _emit(graph_to_dict(loaded.graph, coloring, loaded.ports, header), out)


@cli.command()
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("program")
@click.option("--ports", "ports_spec", default=None, help="canonical or shuffle:<seed> (default: file, else canonical).")
@click.option("--workers", default=1, show_default=True, help="Threads per round.")
@click.option("-o", "--out", default=None, help="Output labeling file (stdout if omitted).")
def simulate(graph_file: str, program: str, ports_spec: Optional[str], workers: int, out: Optional[str]) -> None:
    """Run a node program: single_leaf, constant, identity or gnn:<checkpoint>."""
    loaded = _load_graph(graph_file)
    g = loaded.graph
    try:
        prog, inputs = resolve_program(program, g, loaded.coloring)
        p, label = parse_ports(g, ports_spec, loaded.ports)
        labeling = run_rounds(g, p, prog, inputs, workers)
    except PortGNNError as exc:
        raise _usage(exc)

    data = labeling.to_dict()
    data["program"] = program
    data["ports"] = label
    if g.is_star():
        data["single_leaf"] = verify_single_leaf(g, labeling)
    data["header"] = build_header(None, {"command": "simulate", "graph": g.to_dict(), "program": program, "ports": label})
    _emit(data, out)


@cli.command()
@click.argument("problem", type=click.Choice([p.value for p in Problem]))
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default=None, help="Exact method (per-problem default).")
@click.option("-o", "--out", default=None, help="Output file (stdout if omitted).")
def oracle(problem: str, graph_file: str, method: Optional[str], out: Optional[str]) -> None:
    """Exact optimum of mds, mvc or matching on a small graph."""
    g = _load_graph(graph_file).graph
    try:
        solution = solve(problem, g, method)
    except PortGNNError as exc:
        raise _usage(exc)
    data = {
        "problem": problem,
        "method": method,
        "size": len(solution),
        "solution": [list(item) if isinstance(item, tuple) else item for item in solution],
        "header": build_header(None, {"command": "oracle", "problem": problem, "graph": g.to_dict()}),
    }
    _emit(data, out)


@cli.group()
def exp() -> None:
    """Reproducible experiment bundles."""


def _load_spec(spec_file: Optional[str], train_overrides: Optional[dict] = None, **overrides) -> ExperimentSpec:
    """Spec from --spec (or defaults) with the given flags applied on top."""
    try:
        data = (ExperimentSpec.from_file(spec_file) if spec_file else ExperimentSpec()).to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        data["train"].update({k: v for k, v in (train_overrides or {}).items() if v is not None})
        return ExperimentSpec.from_dict(data)
    except PortGNNError as exc:
        raise _usage(exc)


@exp.command()
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False), default=None, help="ExperimentSpec JSON.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--trials", type=int, default=None, help="Trials per model kind.")
@click.option("--iterations", type=int, default=None, help="REINFORCE iterations per trial.")
@click.option("--delta", type=int, default=None, help="Leaves of the training star (its max degree).")
@click.option("--model", "models", type=click.Choice([k.value for k in ModelKind]), multiple=True, help="Model kind (repeatable).")
@click.option("--workers", default=1, show_default=True, help="Parallel trial workers.")
@click.option("--check", is_flag=True, help="Exit 1 unless vvc solves >= 9/10 and mb/sb 0 of the trials.")
@click.option("--out", "out_dir", default=None, help="Output directory.")
def singleleaf(spec_file, seed, trials, iterations, delta, models, workers, check, out_dir) -> None:
    """Train VVC, MB and SB policies on the single-leaf star task.

    \b
    Writes <name>_<kind>.json, <name>_<kind>_rewards.csv, <name>_summary.csv
    and checkpoints/. CSV columns:
      rewards: trial, iteration, mean_reward
      summary: kind, successes, trials
    """
    spec = _load_spec(
        spec_file,
        seed=seed,
        out_dir=out_dir,
        train_overrides={"trials": trials, "iterations": iterations, "star_leaves": delta},
        model_kinds=tuple(models) or None,
    )
    reports = ExperimentController(spec, workers=workers).run_singleleaf()
    for kind, report in reports.items():
        click.echo(f"{kind}: {report.successes}/{len(report.trials)}")
    if check:
        failed = []
        for kind, report in reports.items():
            if kind == ModelKind.VVC.value and report.successes * 10 < 9 * len(report.trials):
                failed.append(kind)
            elif kind != ModelKind.VVC.value and report.successes:
                failed.append(kind)
        if failed:
            click.echo(f"separation check failed for: {', '.join(failed)}", err=True)
            click.get_current_context().exit(1)


@exp.command()
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False), default=None, help="ExperimentSpec JSON.")
@click.option("--family", default=None, help="random_bounded:N:D, random_suite:N0:N1:D0:D1, star:K0:K1, path:N0:N1, atlas:N or empty.")
@click.option("--count", type=int, default=None, help="Graphs drawn from random families.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--out", "out_dir", default=None, help="Output directory.")
def ratios(spec_file, family, count, seed, out_dir) -> None:
    """Baseline approximation ratios against exact optima.

    \b
    Writes <name>_ratios.csv with columns:
      index, n, m, delta, mds_opt, mds_all_nodes, mds_ratio, mds_bound,
      vc_opt, vc_matching, vc_ratio, within_bounds
    Exits 1 if any graph breaks the Δ+1 (all nodes) or 2 (matching cover) bound.
    """
    spec = _load_spec(spec_file, family=family, count=count, seed=seed, out_dir=out_dir)
    try:
        summary = ExperimentController(spec).run_ratios()
    except PortGNNError as exc:
        raise _usage(exc)
    click.echo(
        f"{summary.graphs} graphs ({summary.skipped} skipped): "
        f"max mds ratio {summary.max_mds_ratio}, max vc ratio {summary.max_vc_ratio}"
    )
    if not summary.passed:
        click.echo(f"{summary.violations} graph(s) break a ratio bound", err=True)
        click.get_current_context().exit(1)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point.

    Returns:
        Exit code
    """
    try:
        result = cli.main(args=argv, prog_name="portgnn", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
