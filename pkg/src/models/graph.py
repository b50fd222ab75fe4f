"""Simple undirected bounded-degree graph model."""

from numbers import Integral
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from ..errors import DegreeBoundExceeded, DuplicateEdge, InvalidEdge, InvalidNode, InvalidParams

Edge = Tuple[int, int]


def exact_int(value, what: str = "value", error: type = InvalidNode) -> int:
    """Return value as an int; floats, bools and strings are refused, never truncated."""
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise error(f"{what} must be an integer, got {value!r}")
    return int(value)


class Graph:
    """Immutable simple undirected graph on nodes 1..n.

    Adjacency lists are sorted and edges are kept in canonical order
    (pairs (u, v) with u < v, sorted lexicographically).
    """

    __slots__ = ("_n", "_adjacency", "_edges")

    def __init__(self, n: int, edge_list: Iterable[Sequence[int]] = ()):
        """Build a graph, validating every edge.

        Args:
            n: Number of nodes (nodes are 1..n)
            edge_list: Unordered pairs in any order and orientation

        Raises:
            InvalidParams: If n is negative
            InvalidEdge: If a pair is malformed or a self-loop
            InvalidNode: If an endpoint lies outside 1..n
            DuplicateEdge: If the same pair appears twice
        """
        if isinstance(n, bool) or not isinstance(n, Integral) or n < 0:
            raise InvalidParams(f"node count must be a non-negative integer, got {n!r}")

        seen = set()
        neighbors: List[List[int]] = [[] for _ in range(int(n))]
        for pair in edge_list:
            if len(pair) != 2:
                raise InvalidEdge(f"edge must have two endpoints, got {pair!r}")
            u, v = exact_int(pair[0], "endpoint"), exact_int(pair[1], "endpoint")
            if u == v:
                raise InvalidEdge(f"self-loop at node {u}")
            for node in (u, v):
                if not 1 <= node <= n:
                    raise InvalidNode(f"node {node} outside 1..{n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise DuplicateEdge(f"edge {{{key[0]}, {key[1]}}} listed twice")
            seen.add(key)
            neighbors[u - 1].append(v)
            neighbors[v - 1].append(u)

        self._n = int(n)
        self._adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in neighbors)
        self._edges: Tuple[Edge, ...] = tuple(sorted(seen))

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self._n

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self._edges)

    @property
    def edges(self) -> Tuple[Edge, ...]:
        """Canonical edge sequence."""
        return self._edges

    @property
    def nodes(self) -> range:
        """Node ids 1..n."""
        return range(1, self._n + 1)

    @property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Sorted neighbor tuples, index v-1 for node v."""
        return self._adjacency

    def neighbors(self, v: int) -> Tuple[int, ...]:
        """Sorted neighbors of node v."""
        self._check_node(v)
        return self._adjacency[v - 1]

    def degree(self, v: int) -> int:
        """Degree of node v."""
        self._check_node(v)
        return len(self._adjacency[v - 1])

    @property
    def degrees(self) -> Tuple[int, ...]:
        """Degrees of all nodes in id order."""
        return tuple(len(a) for a in self._adjacency)

    @property
    def max_degree(self) -> int:
        """Maximum degree (0 for an edgeless graph)."""
        return max(self.degrees, default=0)

    @property
    def min_degree(self) -> int:
        """Minimum degree (0 for the empty graph)."""
        return min(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        """Check whether {u, v} is an edge."""
        if not (1 <= u <= self._n and 1 <= v <= self._n):
            return False
        return v in self._adjacency[u - 1]

    def components(self) -> List[Tuple[int, ...]]:
        """Connected components as sorted node tuples, ordered by lowest id."""
        seen = [False] * (self._n + 1)
        result = []
        for root in self.nodes:
            if seen[root]:
                continue
            seen[root] = True
            stack = [root]
            members = []
            while stack:
                v = stack.pop()
                members.append(v)
                for u in self._adjacency[v - 1]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            result.append(tuple(sorted(members)))
        return result

    def is_star(self) -> bool:
        """Check whether the graph is a star K_{1,k} with k >= 2."""
        if self._n < 3 or self.m != self._n - 1:
            return False
        degrees = sorted(self.degrees)
        return degrees[-1] == self._n - 1 and all(d == 1 for d in degrees[:-1])

    def star_center(self) -> Optional[int]:
        """Center node of a star, or None if the graph is not a star."""
        if not self.is_star():
            return None
        return max(self.nodes, key=self.degree)

    def iter_ports(self) -> Iterator[Tuple[int, int]]:
        """Iterate over all ports (v, i), 1 <= i <= deg(v)."""
        for v in self.nodes:
            for i in range(1, len(self._adjacency[v - 1]) + 1):
                yield (v, i)

    def to_networkx(self) -> nx.Graph:
        """Convert to a networkx graph with the same node ids."""
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self._edges)
        return graph

    def to_dict(self) -> Dict:
        """Convert to a JSON-ready dictionary.

        Returns:
            Dictionary with `n` and canonical `edges`
        """
        return {"n": self._n, "edges": [list(e) for e in self._edges]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Graph":
        """Create a Graph from a dictionary with `n` and `edges`."""
        return cls(data["n"], [tuple(e) for e in data.get("edges", [])])

    def _check_node(self, v: int) -> None:
        if not 1 <= v <= self._n:
            raise InvalidNode(f"node {v} outside 1..{self._n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m}, max_degree={self.max_degree})"


class DegreeBound:
    """Maximum degree Δ admitted for input graphs."""

    __slots__ = ("delta",)

    def __init__(self, delta: int):
        if not isinstance(delta, int) or delta < 1:
            raise InvalidParams(f"degree bound must be a positive integer, got {delta!r}")
        self.delta = delta

    def admits(self, g: Graph) -> bool:
        """Check that every node of g has degree at most delta."""
        return g.max_degree <= self.delta

    def check(self, g: Graph) -> None:
        """Raise DegreeBoundExceeded if g violates the bound."""
        if not self.admits(g):
            raise DegreeBoundExceeded(
                f"graph has max degree {g.max_degree}, bound is {self.delta}"
            )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DegreeBound) and self.delta == other.delta

    def __hash__(self) -> int:
        return hash(self.delta)

    def __repr__(self) -> str:
        return f"DegreeBound({self.delta})"


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Build a canonical Graph from a node count and an edge list.

    Args:
        n: Number of nodes
        edge_list: Sequence of node pairs

    Returns:
        Validated Graph
    """
    return Graph(n, edge_list)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    """Place g2 after g1, shifting its node ids by g1.n."""
    shift = g1.n
    edges = list(g1.edges) + [(u + shift, v + shift) for u, v in g2.edges]
    return Graph(g1.n + g2.n, edges)


def relabel(g: Graph, mapping: Dict[int, int]) -> Graph:
    """Apply a node bijection to g.

    Args:
        g: Source graph
        mapping: Old id -> new id, a permutation of 1..n

    Returns:
        Isomorphic graph with renamed nodes
    """
    if sorted(mapping) != list(g.nodes) or sorted(mapping.values()) != list(g.nodes):
        raise InvalidParams("relabel mapping must be a permutation of the node ids")
    return Graph(g.n, [(mapping[u], mapping[v]) for u, v in g.edges])
