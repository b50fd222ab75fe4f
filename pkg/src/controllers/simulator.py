"""Synchronous round simulator for SB(1), MB(1) and VV_C(1) node programs."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Sequence

import torch

from ..errors import AlphabetViolation, InvalidParams, NotAStar
from ..models.gnn import ModelKind
from ..models.graph import Graph
from ..models.node_program import Labeling, NodeProgram
from ..models.port_numbering import PortNumbering

logger = logging.getLogger(__name__)


def _message_key(message: Any) -> tuple:
    """Sort key that depends only on a message's value."""
    if isinstance(message, torch.Tensor):
        return (2, tuple(message.detach().reshape(-1).tolist()))
    if isinstance(message, (tuple, list)):
        return (3, tuple(_message_key(item) for item in message))
    if isinstance(message, (int, float)) and not isinstance(message, bool):
        return (1, float(message))
    return (4, type(message).__name__, repr(message))


def _map_nodes(fn: Callable, items: Sequence, workers: int) -> List:
    """Apply fn to every item, keeping node order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(*item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda item: fn(*item), items))


class Simulator:
    """Runs one node program on one graph, round by round."""

    def __init__(
        self,
        g: Graph,
        p: Optional[PortNumbering],
        prog: NodeProgram,
        features: Optional[Sequence[Any]] = None,
        workers: int = 1,
    ):
        """Prepare a simulation.

        Args:
            g: Input graph
            p: Consistent port numbering (ignored for SB and MB programs)
            prog: Node program
            features: Per-node inputs in id order (degrees if None)
            workers: Threads used for per-node calls inside a round
        """
        if features is not None and len(features) != g.n:
            raise InvalidParams(f"expected {g.n} node inputs, got {len(features)}")
        if prog.model_class is ModelKind.VVC and (p is None or not p.is_valid(g)):
            raise InvalidParams("VVC programs need a consistent port numbering of the graph")
        self.g = g
        self.p = p
        self.prog = prog
        self.features = list(features) if features is not None else list(g.degrees)
        self.workers = max(1, int(workers))
        self.delta = prog.delta if prog.delta is not None else g.max_degree
        if prog.model_class is ModelKind.VVC and g.max_degree > self.delta:
            raise InvalidParams(f"graph max degree {g.max_degree} exceeds program Δ={self.delta}")

    def _check_alphabet(self, v: int, messages: Sequence[Any]) -> None:
        for message in messages:
            if not self.prog.accepts(message):
                raise AlphabetViolation(
                    f"program {self.prog.name} at node {v} sent {message!r} outside its alphabet"
                )

    def _deliver(self, outgoing: List[Any]) -> List[Any]:
        g = self.g
        kind = self.prog.model_class
        if kind is ModelKind.VVC:
            inboxes: List[List[Any]] = [[None] * self.delta for _ in g.nodes]
            for v in g.nodes:
                messages = list(outgoing[v - 1])
                if len(messages) < g.degree(v):
                    raise AlphabetViolation(
                        f"node {v} sent {len(messages)} messages on {g.degree(v)} ports"
                    )
                self._check_alphabet(v, messages[: g.degree(v)])
                # port i of v feeds port j of u, tagged with the sender port
                for i in range(1, g.degree(v) + 1):
                    u, j = self.p(v, i)
                    inboxes[u - 1][j - 1] = (messages[i - 1], i)
            return inboxes

        # broadcast: one message per node, inbox order carries no port information
        for v in g.nodes:
            self._check_alphabet(v, [outgoing[v - 1]])
        inboxes = []
        for v in g.nodes:
            received = sorted((outgoing[u - 1] for u in g.neighbors(v)), key=_message_key)
            # set semantics: SB sees each distinct message once
            if kind is ModelKind.SB:
                unique = []
                keys = set()
                for message in received:
                    key = _message_key(message)
                    if key not in keys:
                        keys.add(key)
                        unique.append(message)
                received = unique
            inboxes.append(tuple(received))
        return inboxes

    def run(self) -> Labeling:
        """Execute prog.rounds rounds and collect the outputs."""
        g, prog = self.g, self.prog
        states = _map_nodes(prog.init, [(self.features[v - 1], g.degree(v)) for v in g.nodes], self.workers)
        for round_index in range(prog.rounds):
            outgoing = _map_nodes(prog.send, [(state,) for state in states], self.workers)
            inboxes = self._deliver(outgoing)
            states = _map_nodes(prog.receive, list(zip(states, inboxes)), self.workers)
            logger.debug("program %s finished round %d/%d", prog.name, round_index + 1, prog.rounds)
        return Labeling(_map_nodes(prog.finish, [(state,) for state in states], self.workers))


def run_rounds(
    g: Graph,
    p: Optional[PortNumbering],
    prog: NodeProgram,
    features: Optional[Sequence[Any]] = None,
    workers: int = 1,
) -> Labeling:
    """Run a node program for exactly prog.rounds synchronous rounds.

    Args:
        g: Input graph
        p: Consistent port numbering (ignored for SB/MB programs)
        prog: Node program
        features: Per-node inputs (node degrees if None)
        workers: Threads for per-node calls; output does not depend on it

    Returns:
        Labeling produced by prog.finish

    Raises:
        AlphabetViolation: If a message is outside the program's alphabet
    """
    return Simulator(g, p, prog, features, workers).run()


def verify_single_leaf(g: Graph, lab: Labeling) -> bool:
    """True iff exactly one node is labeled 1 and it is a leaf.

    Raises:
        NotAStar: If g is not a star K_{1,k} with k >= 2
    """
    if not g.is_star():
        raise NotAStar(f"{g!r} is not a star K_1,k with k >= 2")
    selected = [v for v in g.nodes if lab[v] == 1]
    return len(selected) == 1 and g.degree(selected[0]) == 1
