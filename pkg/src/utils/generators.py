"""Deterministic graph generators."""

import logging
from typing import Iterator, List, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from ..errors import InvalidParams
from ..models.graph import Edge, Graph

logger = logging.getLogger(__name__)

GENERATOR_KINDS = ("star", "path", "cycle", "random_bounded", "random_bipartite")

Seed = Union[int, np.random.Generator]


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def star(k: int) -> Graph:
    """Star K_{1,k} with center node 1 and leaves 2..k+1."""
    if k < 1:
        raise InvalidParams(f"star needs at least one leaf, got k={k}")
    return Graph(k + 1, [(1, leaf) for leaf in range(2, k + 2)])


def path(n: int) -> Graph:
    """Path 1-2-...-n."""
    if n < 1:
        raise InvalidParams(f"path needs at least one node, got n={n}")
    return Graph(n, [(v, v + 1) for v in range(1, n)])


def cycle(n: int) -> Graph:
    """Cycle 1-2-...-n-1."""
    if n < 3:
        raise InvalidParams(f"cycle needs at least three nodes, got n={n}")
    return Graph(n, [(v, v + 1) for v in range(1, n)] + [(1, n)])


def _add_random_edges(
    edges: Set[Edge],
    degree: List[int],
    candidates: Sequence[Edge],
    delta: int,
    rng: np.random.Generator,
) -> None:
    """Add a random subset of candidate edges without exceeding delta."""
    if not candidates:
        return
    target = int(rng.integers(0, len(candidates) + 1))
    for k in rng.permutation(len(candidates))[:target]:
        u, v = candidates[k]
        if (u, v) in edges or degree[u] >= delta or degree[v] >= delta:
            continue
        edges.add((u, v))
        degree[u] += 1
        degree[v] += 1


def random_bounded(n: int, delta: int, seed: Seed = 0) -> Graph:
    """Random graph with max degree <= delta and min degree >= 1.

    A random pairing of the nodes guarantees min degree 1; further random
    edges are added while both endpoints have spare degree.
    """
    if n < 2 or delta < 1:
        raise InvalidParams(f"random_bounded needs n >= 2 and delta >= 1, got n={n}, delta={delta}")
    if n % 2 == 1 and delta < 2:
        raise InvalidParams("an odd node count needs delta >= 2 to avoid isolated nodes")
    rng = _rng(seed)
    order = [int(v) + 1 for v in rng.permutation(n)]
    edges: Set[Edge] = set()
    degree = [0] * (n + 1)

    def link(u: int, v: int) -> None:
        edges.add((min(u, v), max(u, v)))
        degree[u] += 1
        degree[v] += 1

    for k in range(0, n - 1, 2):
        link(order[k], order[k + 1])
    if n % 2 == 1:
        link(order[-1], order[0])

    candidates = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    _add_random_edges(edges, degree, candidates, delta, rng)
    return Graph(n, sorted(edges))


def random_bipartite(a: int, b: int, delta: int, seed: Seed = 0) -> Graph:
    """Random bipartite graph with parts 1..a and a+1..a+b.

    Max degree <= delta, min degree >= 1.
    """
    if a < 1 or b < 1 or delta < 1:
        raise InvalidParams(f"random_bipartite needs a, b, delta >= 1, got {a}, {b}, {delta}")
    if max(a, b) > min(a, b) * delta:
        raise InvalidParams(
            f"parts of sizes {a} and {b} cannot be covered with max degree {delta}"
        )
    rng = _rng(seed)
    left = [int(v) + 1 for v in rng.permutation(a)]
    right = [a + int(v) + 1 for v in rng.permutation(b)]
    edges: Set[Edge] = set()
    degree = [0] * (a + b + 1)
    for k in range(max(a, b)):
        u, v = left[k % a], right[k % b]
        edges.add((u, v))
        degree[u] += 1
        degree[v] += 1

    candidates = [(u, v) for u in range(1, a + 1) for v in range(a + 1, a + b + 1)]
    _add_random_edges(edges, degree, candidates, delta, rng)
    return Graph(a + b, sorted(edges))


def generate(kind: str, params: Sequence[int], seed: Seed = 0) -> Graph:
    """Generate a graph of the given family.

    Args:
        kind: One of GENERATOR_KINDS
        params: Family parameters (star: k; path/cycle: n;
            random_bounded: n, delta; random_bipartite: a, b, delta)
        seed: Seed for the random families (ignored by the fixed ones)

    Returns:
        Generated Graph, identical for identical (kind, params, seed)

    Raises:
        InvalidParams: If the kind is unknown or the parameters are infeasible
    """
    arity = {"star": 1, "path": 1, "cycle": 1, "random_bounded": 2, "random_bipartite": 3}
    if kind not in arity:
        raise InvalidParams(f"unknown graph kind {kind!r}, expected one of {GENERATOR_KINDS}")
    values = [int(x) for x in params]
    if len(values) != arity[kind]:
        raise InvalidParams(f"{kind} takes {arity[kind]} parameter(s), got {len(values)}")

    logger.debug("generating %s%s with seed %s", kind, tuple(values), seed)
    if kind == "star":
        return star(*values)
    if kind == "path":
        return path(*values)
    if kind == "cycle":
        return cycle(*values)
    if kind == "random_bounded":
        return random_bounded(*values, seed=seed)
    return random_bipartite(*values, seed=seed)


def connected_graphs(max_n: int) -> Iterator[Graph]:
    """All connected graphs with 1..max_n nodes, up to isomorphism.

    Backed by the networkx graph atlas, which covers up to 7 nodes.
    """
    if not 1 <= max_n <= 7:
        raise InvalidParams(f"the graph atlas covers 1..7 nodes, got max_n={max_n}")
    for atlas_graph in nx.graph_atlas_g():
        size = atlas_graph.number_of_nodes()
        if size == 0 or size > max_n or not nx.is_connected(atlas_graph):
            continue
        yield Graph(size, [(u + 1, v + 1) for u, v in atlas_graph.edges()])


def random_suite(
    count: int, n_range: Tuple[int, int], delta_range: Tuple[int, int], seed: int
) -> List[Graph]:
    """A reproducible list of random bounded-degree graphs.

    Args:
        count: Number of graphs
        n_range: Inclusive range of node counts
        delta_range: Inclusive range of degree bounds
        seed: Master seed

    Returns:
        List of graphs, each with its own spawned generator
    """
    children = np.random.SeedSequence(seed).spawn(count)
    suite = []
    for child in children:
        rng = np.random.default_rng(child)
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        delta = int(rng.integers(delta_range[0], delta_range[1] + 1))
        if n % 2 == 1 and delta < 2:
            delta = 2
        suite.append(random_bounded(n, delta, seed=rng))
    return suite
