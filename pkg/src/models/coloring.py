"""Weak and proper 2-colorings computed by breadth-first search."""

from collections import deque
from typing import Dict, List, Sequence, Tuple

from ..errors import InvalidColoring, NoWeakColoring, NotBipartite
from .graph import Graph


class Coloring:
    """Mapping V -> {0, 1}, stored in node id order."""

    __slots__ = ("_colors",)

    def __init__(self, colors: Sequence[int]):
        values = tuple(int(c) for c in colors)
        if any(c not in (0, 1) for c in values):
            raise InvalidColoring(f"colors must be 0 or 1, got {list(values)}")
        self._colors = values

    def __getitem__(self, v: int) -> int:
        return self._colors[v - 1]

    def __len__(self) -> int:
        return len(self._colors)

    @property
    def colors(self) -> Tuple[int, ...]:
        """Colors of nodes 1..n."""
        return self._colors

    def to_list(self) -> List[int]:
        """JSON-ready list of colors."""
        return list(self._colors)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Coloring):
            return self._colors == other._colors
        if isinstance(other, (tuple, list)):
            return self._colors == tuple(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._colors)

    def __repr__(self) -> str:
        return f"Coloring({list(self._colors)})"


def _bfs_layers(g: Graph) -> Dict[int, int]:
    """Layer parity from a BFS per component, rooted at the lowest id."""
    color: Dict[int, int] = {}
    for component in g.components():
        root = component[0]
        color[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u not in color:
                    color[u] = 1 - color[v]
                    queue.append(u)
    return color


def weak_two_coloring(g: Graph) -> Coloring:
    """Compute a weak 2-coloring by BFS layer parity.

    On bipartite graphs the result is a proper 2-coloring.

    Args:
        g: Graph without isolated nodes

    Returns:
        Coloring where every node has an oppositely colored neighbor

    Raises:
        NoWeakColoring: If some node has degree 0
    """
    isolated = [v for v in g.nodes if g.degree(v) == 0]
    if isolated:
        raise NoWeakColoring(f"isolated nodes {isolated} have no neighbor to contrast with")
    color = _bfs_layers(g)
    return Coloring([color[v] for v in g.nodes])


def two_coloring(g: Graph) -> Coloring:
    """Compute a proper 2-coloring.

    Raises:
        NotBipartite: If g contains an odd cycle
    """
    color = _bfs_layers(g)
    for u, v in g.edges:
        if color[u] == color[v]:
            raise NotBipartite(f"edge {{{u}, {v}}} closes an odd cycle")
    return Coloring([color[v] for v in g.nodes])


def is_weak_two_coloring(g: Graph, c: Coloring) -> bool:
    """Every node has at least one neighbor of the opposite color."""
    if len(c) != g.n:
        return False
    return all(any(c[u] != c[v] for u in g.neighbors(v)) for v in g.nodes)


def is_proper_two_coloring(g: Graph, c: Coloring) -> bool:
    """No edge is monochromatic."""
    if len(c) != g.n:
        return False
    return all(c[u] != c[v] for u, v in g.edges)
