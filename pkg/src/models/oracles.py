"""Exact small-instance solvers, validity checks and trivial baselines.

Every solver returns the lexicographically smallest optimum so that results
are independent of search order.
"""

import itertools
import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import InvalidParams, TooLarge, Undefined
from .graph import Edge, Graph

NodeSet = Tuple[int, ...]
EdgeSet = Tuple[Edge, ...]

NODE_CAP = 24
EDGE_CAP = 24
EXHAUSTIVE_CAP = 16

METHODS = ("enumerate", "branch_and_bound", "exhaustive")


class Problem(Enum):
    """Combinatorial problems with exact oracles."""

    DOMINATING_SET = "mds"
    VERTEX_COVER = "mvc"
    MATCHING = "matching"


class Sense(Enum):
    MIN = "min"
    MAX = "max"


class Ratio:
    """Exact approximation ratio; `value` is None for the infinite ratio."""

    __slots__ = ("value",)

    def __init__(self, value: Optional[Fraction]):
        self.value = None if value is None else Fraction(value)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def _coerce(self, other: object) -> Optional[Fraction]:
        if isinstance(other, Ratio):
            return other.value
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        raise TypeError(f"cannot compare Ratio with {type(other).__name__}")

    def __eq__(self, other: object) -> bool:
        try:
            return self.value == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __le__(self, other: object) -> bool:
        bound = self._coerce(other)
        if self.value is None:
            return bound is None
        return bound is None or self.value <= bound

    def __lt__(self, other: object) -> bool:
        return self <= other and not self == other

    def __ge__(self, other: object) -> bool:
        bound = self._coerce(other)
        if self.value is None:
            return True
        return bound is not None and self.value >= bound

    def __gt__(self, other: object) -> bool:
        return self >= other and not self == other

    def __hash__(self) -> int:
        return hash(self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return f"Ratio({self})"


INFINITE = Ratio(None)


def approx_ratio(candidate_size: int, opt_size: int, sense: Union[Sense, str]) -> Ratio:
    """candidate/opt for minimization, opt/candidate for maximization.

    Raises:
        Undefined: If opt_size is 0 for a minimization problem
    """
    sense = Sense(sense)
    if candidate_size < 0 or opt_size < 0:
        raise InvalidParams("sizes must be non-negative")
    if sense is Sense.MIN:
        if opt_size == 0:
            raise Undefined("minimization ratio with optimum 0 is undefined")
        return Ratio(Fraction(candidate_size, opt_size))
    if candidate_size == 0:
        if opt_size == 0:
            return Ratio(Fraction(1))
        return INFINITE
    return Ratio(Fraction(opt_size, candidate_size))


def _closed_masks(g: Graph) -> List[int]:
    masks = [0] * (g.n + 1)
    for v in g.nodes:
        mask = 1 << v
        for u in g.neighbors(v):
            mask |= 1 << u
        masks[v] = mask
    return masks


def _full_mask(g: Graph) -> int:
    return sum(1 << v for v in g.nodes)


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise TooLarge(f"{what} {size} exceeds the enumeration cap {cap}")


def is_dominating_set(g: Graph, candidate: Iterable[int]) -> bool:
    """Every node is in the candidate or adjacent to it."""
    chosen = set(candidate)
    if any(not 1 <= v <= g.n for v in chosen):
        return False
    return all(v in chosen or any(u in chosen for u in g.neighbors(v)) for v in g.nodes)


def is_vertex_cover(g: Graph, candidate: Iterable[int]) -> bool:
    """Every edge has an endpoint in the candidate."""
    chosen = set(candidate)
    if any(not 1 <= v <= g.n for v in chosen):
        return False
    return all(u in chosen or v in chosen for u, v in g.edges)


def is_matching(g: Graph, candidate: Iterable[Sequence[int]]) -> bool:
    """Candidate edges exist and share no endpoint."""
    used = set()
    for pair in candidate:
        u, v = pair
        if not g.has_edge(u, v) or u in used or v in used:
            return False
        used.update((u, v))
    return True


def check(problem: Union[Problem, str], g: Graph, candidate: Iterable) -> bool:
    """Validity of a candidate solution (no optimality claim)."""
    problem = Problem(problem)
    if problem is Problem.DOMINATING_SET:
        return is_dominating_set(g, candidate)
    if problem is Problem.VERTEX_COVER:
        return is_vertex_cover(g, candidate)
    return is_matching(g, candidate)


def _smallest_subset(g: Graph, valid, start: int = 0) -> NodeSet:
    """First valid subset in order of cardinality, then lexicographic order."""
    for size in range(start, g.n + 1):
        for combo in itertools.combinations(g.nodes, size):
            if valid(combo):
                return combo
    return tuple(g.nodes)


def _exhaustive_min(g: Graph, valid) -> NodeSet:
    _check_cap(g.n, EXHAUSTIVE_CAP, "node count")
    best: Optional[NodeSet] = None
    nodes = list(g.nodes)
    for bits in range(1 << g.n):
        subset = tuple(v for k, v in enumerate(nodes) if bits >> k & 1)
        if valid(subset) and (best is None or (len(subset), subset) < (len(best), best)):
            best = subset
    return best if best is not None else tuple(nodes)


def _mds_enumerate(g: Graph) -> NodeSet:
    masks = _closed_masks(g)
    full = _full_mask(g)
    lower = math.ceil(g.n / (g.max_degree + 1)) if g.n else 0

    def valid(combo: Sequence[int]) -> bool:
        covered = 0
        for v in combo:
            covered |= masks[v]
        return covered == full

    return _smallest_subset(g, valid, lower)


def _mds_branch_and_bound(g: Graph) -> NodeSet:
    masks = _closed_masks(g)
    full = _full_mask(g)
    reach = g.max_degree + 1
    best: List[Optional[NodeSet]] = [tuple(g.nodes)]

    def search(chosen: Tuple[int, ...], covered: int) -> None:
        if covered == full:
            if (len(chosen), tuple(sorted(chosen))) < (len(best[0]), best[0]):
                best[0] = tuple(sorted(chosen))
            return
        # a node dominates at most max_degree + 1 nodes
        missing = bin(full & ~covered).count("1")
        if len(chosen) + math.ceil(missing / reach) > len(best[0]):
            return
        # the first undominated node needs itself or a neighbor in the set
        u = next(v for v in g.nodes if not covered >> v & 1)
        for w in sorted((u,) + g.neighbors(u)):
            if w not in chosen:
                search(chosen + (w,), covered | masks[w])

    if g.n:
        search((), 0)
    return best[0]


def min_dominating_set(g: Graph, method: str = "enumerate") -> NodeSet:
    """Minimum dominating set.

    Args:
        g: Graph with at most NODE_CAP nodes
        method: `enumerate` (by increasing cardinality with a counting
            lower bound), `branch_and_bound`, or `exhaustive` (all subsets)

    Returns:
        Lexicographically smallest minimum dominating set

    Raises:
        TooLarge: Above the enumeration cap
    """
    _check_cap(g.n, NODE_CAP, "node count")
    if method == "enumerate":
        return _mds_enumerate(g)
    if method == "branch_and_bound":
        return _mds_branch_and_bound(g)
    if method == "exhaustive":
        return _exhaustive_min(g, lambda subset: is_dominating_set(g, subset))
    raise InvalidParams(f"unknown method {method!r}, expected one of {METHODS}")


def _greedy_matching_size(edges: Iterable[Edge]) -> int:
    used = set()
    size = 0
    for u, v in edges:
        if u not in used and v not in used:
            used.update((u, v))
            size += 1
    return size


def _mvc_branch_and_bound(g: Graph) -> NodeSet:
    best: List[NodeSet] = [tuple(sorted({v for e in g.edges for v in e}))]

    def search(chosen: frozenset) -> None:
        uncovered = [(u, v) for u, v in g.edges if u not in chosen and v not in chosen]
        current = tuple(sorted(chosen))
        if not uncovered:
            if (len(current), current) < (len(best[0]), best[0]):
                best[0] = current
            return
        # every edge of a matching needs its own cover node
        if len(chosen) + _greedy_matching_size(uncovered) > len(best[0]):
            return
        # one endpoint of the first uncovered edge is in any cover
        u, v = uncovered[0]
        search(chosen | {u})
        search(chosen | {v})

    search(frozenset())
    return best[0]


def min_vertex_cover(g: Graph, method: str = "branch_and_bound") -> NodeSet:
    """Minimum vertex cover.

    Args:
        g: Graph with at most NODE_CAP nodes
        method: `branch_and_bound` (branch on the endpoints of the first
            uncovered edge, bounded by a greedy matching), `enumerate`, or
            `exhaustive`

    Returns:
        Lexicographically smallest minimum vertex cover

    Raises:
        TooLarge: Above the enumeration cap
    """
    _check_cap(g.n, NODE_CAP, "node count")
    if method == "branch_and_bound":
        return _mvc_branch_and_bound(g)
    if method == "enumerate":
        return _smallest_subset(g, lambda combo: is_vertex_cover(g, combo), _greedy_matching_size(g.edges))
    if method == "exhaustive":
        return _exhaustive_min(g, lambda subset: is_vertex_cover(g, subset))
    raise InvalidParams(f"unknown method {method!r}, expected one of {METHODS}")


def _matching_search(g: Graph) -> EdgeSet:
    # Include-first DFS visits matchings in lexicographic order, so the first
    # matching of each size is the smallest one and ties can be pruned.
    edges = g.edges
    best: List[EdgeSet] = [()]

    def search(index: int, chosen: Tuple[Edge, ...], used: frozenset) -> None:
        if len(chosen) > len(best[0]):
            best[0] = chosen
        if index == len(edges):
            return
        reachable = min(len(edges) - index, (g.n - len(used)) // 2)
        if len(chosen) + reachable <= len(best[0]):
            return
        u, v = edges[index]
        if u not in used and v not in used:
            search(index + 1, chosen + ((u, v),), used | {u, v})
        search(index + 1, chosen, used)

    search(0, (), frozenset())
    return best[0]


def _matching_exhaustive(g: Graph) -> EdgeSet:
    _check_cap(g.m, EXHAUSTIVE_CAP, "edge count")
    best: EdgeSet = ()
    for bits in range(1 << g.m):
        subset = tuple(e for k, e in enumerate(g.edges) if bits >> k & 1)
        if len(subset) >= len(best) and is_matching(g, subset):
            if len(subset) > len(best) or subset < best:
                best = subset
    return best


def max_matching(g: Graph, method: str = "enumerate") -> EdgeSet:
    """Maximum matching by edge-subset enumeration.

    Args:
        g: Graph with at most EDGE_CAP edges
        method: `enumerate` (include/exclude search over canonical edges
            with a remaining-edges bound) or `exhaustive` (all subsets)

    Returns:
        Lexicographically smallest maximum matching

    Raises:
        TooLarge: Above the enumeration cap
    """
    _check_cap(g.m, EDGE_CAP, "edge count")
    if method in ("enumerate", "branch_and_bound"):
        return _matching_search(g)
    if method == "exhaustive":
        return _matching_exhaustive(g)
    raise InvalidParams(f"unknown method {method!r}, expected one of {METHODS}")


def all_nodes_baseline(g: Graph) -> NodeSet:
    """V itself: a dominating set within ratio Δ+1."""
    return tuple(g.nodes)


def greedy_maximal_matching(g: Graph, seed: Optional[int] = None) -> EdgeSet:
    """Greedy maximal matching in canonical edge order, or a seeded shuffle."""
    edges = list(g.edges)
    if seed is not None:
        rng = np.random.default_rng(seed)
        edges = [edges[k] for k in rng.permutation(len(edges))]
    used = set()
    chosen = []
    for u, v in edges:
        if u not in used and v not in used:
            used.update((u, v))
            chosen.append((u, v))
    return tuple(sorted(chosen))


def matching_vc_baseline(g: Graph, seed: Optional[int] = None) -> NodeSet:
    """Endpoints of a greedy maximal matching: a vertex cover within ratio 2."""
    return tuple(sorted({v for edge in greedy_maximal_matching(g, seed) for v in edge}))


def solve(problem: Union[Problem, str], g: Graph, method: Optional[str] = None):
    """Dispatch to the exact oracle for `problem`."""
    problem = Problem(problem)
    if problem is Problem.DOMINATING_SET:
        return min_dominating_set(g, method or "enumerate")
    if problem is Problem.VERTEX_COVER:
        return min_vertex_cover(g, method or "branch_and_bound")
    return max_matching(g, method or "enumerate")
