"""Port numberings: consistent construction, lookup and local views."""

from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import InvalidNode, InvalidParams
from .graph import Edge, Graph, exact_int

Port = Tuple[int, int]
NONE = None


class PortNumbering:
    """Mapping p over the ports (v, i) of a graph.

    p(v, i) = (u, j) means that node v sends on its port i and the message
    arrives at port j of node u. A numbering is consistent when p is an
    involution.
    """

    __slots__ = ("_forward", "_inverse")

    def __init__(self, forward: Mapping[Port, Port]):
        """Wrap a forward mapping.

        Args:
            forward: Dictionary from port (v, i) to port (u, j)
        """
        self._forward: Dict[Port, Port] = {
            (int(v), int(i)): (int(u), int(j)) for (v, i), (u, j) in forward.items()
        }
        self._inverse: Dict[Port, Port] = {dst: src for src, dst in self._forward.items()}

    def __call__(self, v: int, i: int) -> Port:
        return self._forward[(v, i)]

    def get(self, v: int, i: int) -> Optional[Port]:
        """Forward lookup returning None for unknown ports."""
        return self._forward.get((v, i))

    def sender(self, v: int, i: int) -> Optional[Port]:
        """Port (u, j) whose message lands on (v, i), or None."""
        return self._inverse.get((v, i))

    @property
    def ports(self) -> Tuple[Port, ...]:
        """All ports in the domain, sorted."""
        return tuple(sorted(self._forward))

    def items(self) -> List[Tuple[Port, Port]]:
        """Sorted (source, target) pairs."""
        return sorted(self._forward.items())

    def is_total(self, g: Graph) -> bool:
        """Check that the domain is exactly P(G)."""
        return set(self._forward) == set(g.iter_ports())

    def is_edge_realizing(self, g: Graph) -> bool:
        """Check that every edge {u, v} is realized by some p(u, i) = (v, j)."""
        realized = set()
        for (v, _), (u, _) in self._forward.items():
            if not g.has_edge(u, v):
                return False
            realized.add((min(u, v), max(u, v)))
        return realized == set(g.edges)

    def is_consistent(self) -> bool:
        """Check the involution law p(p(v, i)) = (v, i)."""
        return all(self._forward.get(dst) == src for src, dst in self._forward.items())

    def is_valid(self, g: Graph) -> bool:
        """Total, edge-realizing and consistent on g."""
        return self.is_total(g) and self.is_edge_realizing(g) and self.is_consistent()

    def disjoint_union(self, other: "PortNumbering", shift: int) -> "PortNumbering":
        """Combine with a numbering of a second graph whose nodes are shifted by `shift`."""
        forward = dict(self._forward)
        for (v, i), (u, j) in other._forward.items():
            forward[(v + shift, i)] = (u + shift, j)
        return PortNumbering(forward)

    def relabel(self, mapping: Mapping[int, int]) -> "PortNumbering":
        """Rename nodes, keeping every port index."""
        return PortNumbering(
            {(mapping[v], i): (mapping[u], j) for (v, i), (u, j) in self._forward.items()}
        )

    def to_pairs(self) -> List[List[List[int]]]:
        """Encode as [[v, i], [u, j]] pairs in canonical order."""
        return [[[v, i], [u, j]] for (v, i), (u, j) in self.items()]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[Sequence[int]]]) -> "PortNumbering":
        """Decode from [[v, i], [u, j]] pairs; later duplicates are rejected."""
        forward: Dict[Port, Port] = {}
        for src, dst in pairs:
            key = (exact_int(src[0], "node", InvalidParams), exact_int(src[1], "port", InvalidParams))
            if key in forward:
                raise InvalidParams(f"port {key} assigned twice")
            forward[key] = (exact_int(dst[0], "node", InvalidParams), exact_int(dst[1], "port", InvalidParams))
        return cls(forward)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PortNumbering):
            return NotImplemented
        return self._forward == other._forward

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        return f"PortNumbering(ports={len(self._forward)}, consistent={self.is_consistent()})"


def consistent_port_numbering(
    g: Graph, edge_order: Optional[Sequence[Edge]] = None
) -> PortNumbering:
    """Number ports edge by edge with per-node counters.

    Args:
        g: Input graph
        edge_order: Order in which edges are scanned (canonical order if None)

    Returns:
        Consistent port numbering, deterministic for a given edge order
    """
    edges = g.edges if edge_order is None else edge_order
    counters = [0] * (g.n + 1)
    forward: Dict[Port, Port] = {}
    for u, v in edges:
        counters[u] += 1
        counters[v] += 1
        forward[(u, counters[u])] = (v, counters[v])
        forward[(v, counters[v])] = (u, counters[u])
    return PortNumbering(forward)


def shuffled_port_numbering(
    g: Graph, seed: Union[int, np.random.Generator]
) -> PortNumbering:
    """Sample a consistent port numbering.

    The edges are scanned in a shuffled order and every node's port indices
    are then permuted uniformly, so every consistent numbering of g can occur.

    Args:
        g: Input graph
        seed: Integer seed or numpy Generator

    Returns:
        Consistent port numbering
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = [g.edges[k] for k in rng.permutation(g.m)] if g.m else []
    base = consistent_port_numbering(g, order)
    relabels = {v: [0] + [int(k) + 1 for k in rng.permutation(g.degree(v))] for v in g.nodes}
    return PortNumbering(
        {
            (v, relabels[v][i]): (u, relabels[u][j])
            for (v, i), (u, j) in base.items()
        }
    )


def distinct_port_numberings(
    g: Graph, count: int, rng: np.random.Generator, max_attempts: int = 1000
) -> List[PortNumbering]:
    """Draw up to `count` pairwise distinct consistent port numberings.

    The canonical numbering is always first. Fewer are returned when g has
    fewer distinct numberings than requested.
    """
    result = [consistent_port_numbering(g)]
    seen = {result[0]}
    attempts = 0
    while len(result) < count and attempts < max_attempts:
        attempts += 1
        candidate = shuffled_port_numbering(g, rng)
        if candidate not in seen:
            seen.add(candidate)
            result.append(candidate)
    return result


def port_lookup(g: Graph, p: PortNumbering, v: int, i: int) -> Tuple[Optional[int], Optional[int]]:
    """Return (p_tail(v, i), p_n(v, i)).

    Args:
        g: Graph the numbering belongs to
        p: Port numbering
        v: Receiving node
        i: Port index in 1..delta, may exceed deg(v)

    Returns:
        Sending node and its port index, or (NONE, NONE) when i > deg(v)
    """
    if not 1 <= v <= g.n:
        raise InvalidNode(f"node {v} outside 1..{g.n}")
    if i < 1 or i > g.degree(v):
        return NONE, NONE
    sender = p.sender(v, i)
    if sender is None:
        return NONE, NONE
    return sender


def port_table(g: Graph, p: PortNumbering, delta: int) -> List[List[Tuple[Optional[int], Optional[int]]]]:
    """Precompute port_lookup for every node and every port 1..delta."""
    return [[port_lookup(g, p, v, i) for i in range(1, delta + 1)] for v in g.nodes]


def local_view(
    g: Graph,
    p: Optional[PortNumbering],
    v: int,
    radius: int,
    features: Optional[Sequence[Hashable]] = None,
) -> Tuple:
    """Canonical radius-`radius` local view of node v.

    With a port numbering the view is ordered by port and records the
    sender's back-port; without one (p is None) the children form a sorted
    multiset, which is the view available to broadcasting models.

    Args:
        g: Input graph
        p: Consistent port numbering, or None for the port-free view
        v: Root node
        radius: Number of communication rounds
        features: Per-node hashable input (degree if None)

    Returns:
        Nested tuple; equal tuples mean indistinguishable nodes
    """
    labels = list(features) if features is not None else list(g.degrees)

    def view(node: int, r: int) -> Tuple:
        own = labels[node - 1]
        if r == 0:
            return (own,)
        if p is None:
            return (own, tuple(sorted(view(u, r - 1) for u in g.neighbors(node))))
        children = []
        for i in range(1, g.degree(node) + 1):
            tail, back = port_lookup(g, p, node, i)
            children.append((i, back, view(tail, r - 1)))
        return (own, tuple(children))

    return view(v, radius)
