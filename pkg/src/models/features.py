"""Node feature construction and decoding of per-port edge outputs."""

from typing import List, Optional, Sequence, Tuple

import torch

from ..errors import DegreeBoundExceeded, InvalidColoring, InvalidEdgeLabels, InvalidParams
from .coloring import Coloring, is_proper_two_coloring, is_weak_two_coloring
from .graph import Edge, Graph
from .port_numbering import PortNumbering

DEGREE = "degree"
DEGREE_WEAK2 = "degree+weak2"
DEGREE_2COLOR = "degree+2color"
FEATURE_SPECS = (DEGREE, DEGREE_WEAK2, DEGREE_2COLOR)


def feature_width(spec: str, delta: int) -> int:
    """Width d_1 of the feature vectors produced for `spec`."""
    if spec not in FEATURE_SPECS:
        raise InvalidParams(f"unknown feature spec {spec!r}, expected one of {FEATURE_SPECS}")
    return delta if spec == DEGREE else delta + 1


def node_features(
    g: Graph, spec: str, delta: int, coloring: Optional[Coloring] = None
) -> torch.Tensor:
    """One-hot degree over [Δ], optionally followed by the color bit.

    A node of degree 0 gets an all-zero degree block.

    Args:
        g: Input graph
        spec: `degree`, `degree+weak2` or `degree+2color`
        delta: Degree bound Δ
        coloring: Required for the colored specs

    Returns:
        float64 tensor of shape n x feature_width(spec, delta)

    Raises:
        InvalidColoring: If the feature spec needs a coloring that is missing or invalid
        DegreeBoundExceeded: If some degree exceeds delta
    """
    width = feature_width(spec, delta)
    if g.max_degree > delta:
        raise DegreeBoundExceeded(f"graph max degree {g.max_degree} exceeds Δ={delta}")
    if spec != DEGREE:
        if coloring is None:
            raise InvalidColoring(f"feature spec {spec} needs a coloring")
        valid = is_weak_two_coloring if spec == DEGREE_WEAK2 else is_proper_two_coloring
        if not valid(g, coloring):
            kind = "weak 2-coloring" if spec == DEGREE_WEAK2 else "proper 2-coloring"
            raise InvalidColoring(f"coloring {coloring.to_list()} is not a {kind}")

    x = torch.zeros(g.n, width, dtype=torch.float64)
    for v in g.nodes:
        d = g.degree(v)
        if d:
            x[v - 1, d - 1] = 1.0
        if spec != DEGREE:
            x[v - 1, delta] = float(coloring[v])
    return x


class EdgePortLabels:
    """Per-node bit vector y(v) ∈ {0,1}^Δ; bit i speaks for port i."""

    __slots__ = ("delta", "_bits")

    def __init__(self, g: Graph, delta: int, bits: Sequence[Sequence[int]]):
        """Validate and store per-node bits.

        Raises:
            InvalidEdgeLabels: If shapes are wrong, a bit is not 0/1, or a bit
                beyond deg(v) is set
        """
        if len(bits) != g.n:
            raise InvalidEdgeLabels(f"expected {g.n} bit vectors, got {len(bits)}")
        rows: List[Tuple[int, ...]] = []
        for v, row in zip(g.nodes, bits):
            values = tuple(int(b) for b in row)
            if len(values) != delta or any(b not in (0, 1) for b in values):
                raise InvalidEdgeLabels(f"node {v} needs {delta} bits in {{0, 1}}, got {list(row)}")
            if any(values[g.degree(v):]):
                raise InvalidEdgeLabels(f"node {v} sets bits beyond its degree {g.degree(v)}")
            rows.append(values)
        self.delta = delta
        self._bits = tuple(rows)

    def bit(self, v: int, i: int) -> int:
        """y(v)_i, 1-based port index."""
        return self._bits[v - 1][i - 1]

    @classmethod
    def all_ones(cls, g: Graph, delta: int) -> "EdgePortLabels":
        """Every node says yes on every existing port."""
        return cls(g, delta, [[1 if i < g.degree(v) else 0 for i in range(delta)] for v in g.nodes])


def decode_edge_output(g: Graph, p: PortNumbering, y: EdgePortLabels) -> Tuple[Edge, ...]:
    """Edges {u, v} with p(u, i) = (v, j) and y(u)_i = y(v)_j = 1.

    Returns:
        Canonically sorted edge tuple
    """
    chosen = set()
    for (u, i), (v, j) in p.items():
        if y.bit(u, i) and y.bit(v, j):
            chosen.add((min(u, v), max(u, v)))
    return tuple(sorted(chosen))
