"""Node programs for the SB(1), MB(1) and VV_C(1) local computation models."""

from dataclasses import dataclass, replace
from typing import Any, Callable, Hashable, Iterable, List, Optional, Sequence, Tuple

import torch

from ..errors import InvalidParams
from .gnn import DTYPE, GNNModel, ModelKind, cpngnn_update, readout

SELECT = "select"
REJECT = "reject"


@dataclass(frozen=True)
class NodeProgram:
    """A deterministic local algorithm run identically by every node.

    Each round every node first `send`s from its current state, then all
    messages are delivered, then every node `receive`s. Shapes of messages:

    - VVC: `send` returns one message per port (index i-1 for port i);
      `receive` gets a list of length Δ whose entry i-1 is
      (message, sender_back_port) or None when i > deg(v).
    - MB: `send` returns one broadcast message; `receive` gets the multiset
      of neighbor messages as a canonically sorted tuple.
    - SB: as MB, with duplicates removed.

    Attributes:
        name: Registry name
        model_class: SB, MB or VVC
        rounds: Number of synchronous rounds L
        init: (feature, degree) -> state
        send: state -> outgoing
        receive: (state, received) -> state
        finish: state -> output label
        alphabet: Predicate accepting the legal messages (None accepts all)
        delta: Length of the VVC receive vector (graph max degree if None)
    """

    name: str
    model_class: ModelKind
    rounds: int
    init: Callable[[Any, int], Any]
    send: Callable[[Any], Any]
    receive: Callable[[Any, Any], Any]
    finish: Callable[[Any], Hashable]
    alphabet: Optional[Callable[[Any], bool]] = None
    delta: Optional[int] = None

    def __post_init__(self) -> None:
        if self.rounds < 0:
            raise InvalidParams(f"rounds must be non-negative, got {self.rounds}")

    def step(self, state: Any, received: Any) -> Tuple[Any, Any]:
        """Receive a round's messages and produce the next outgoing messages."""
        new_state = self.receive(state, received)
        return new_state, self.send(new_state)

    def accepts(self, message: Any) -> bool:
        """Check one message against the alphabet."""
        return self.alphabet is None or bool(self.alphabet(message))


class Labeling:
    """Solution V -> Y, stored in node id order."""

    __slots__ = ("_labels",)

    def __init__(self, labels: Iterable[Hashable]):
        self._labels: Tuple[Hashable, ...] = tuple(labels)

    def __getitem__(self, v: int) -> Hashable:
        return self._labels[v - 1]

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> Tuple[Hashable, ...]:
        """Labels of nodes 1..n."""
        return self._labels

    def selected(self, label: Hashable = 1) -> Tuple[int, ...]:
        """Nodes carrying `label`."""
        return tuple(v for v, value in enumerate(self._labels, start=1) if value == label)

    def to_dict(self) -> dict:
        """JSON-ready dictionary."""
        return {"labels": [_jsonable(value) for value in self._labels]}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Labeling):
            return self._labels == other._labels
        if isinstance(other, (tuple, list)):
            return self._labels == tuple(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        return f"Labeling({list(self._labels)})"


def _jsonable(value: Any) -> Any:
    if isinstance(value, torch.Tensor):
        return value.tolist()
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class _LeafState:
    degree: int
    round: int = 0
    neighbor_degrees: Tuple[int, ...] = ()
    selected: bool = False


def _leaf_alphabet(message: Any) -> bool:
    if message in (SELECT, REJECT):
        return True
    return isinstance(message, int) and not isinstance(message, bool) and message >= 0


def _leaf_send(state: _LeafState) -> List[Any]:
    if state.round == 0:
        return [state.degree] * state.degree
    if state.round == 1:
        is_center = state.degree >= 2 and all(d == 1 for d in state.neighbor_degrees)
        if is_center:
            return [SELECT] + [REJECT] * (state.degree - 1)
        return [REJECT] * state.degree
    return []


def _leaf_receive(state: _LeafState, received: Sequence[Optional[Tuple[Any, int]]]) -> _LeafState:
    if state.round == 0:
        degrees = tuple(entry[0] for entry in received if entry is not None)
        return replace(state, round=1, neighbor_degrees=degrees)
    if state.round == 1:
        first = received[0] if received else None
        chosen = state.degree == 1 and first is not None and first[0] == SELECT
        return replace(state, round=2, selected=chosen)
    return replace(state, round=state.round + 1)


def single_leaf_program() -> NodeProgram:
    """Two-round VVC program selecting exactly one leaf of any star.

    Round 1: every node sends its degree on all ports. Round 2: a star
    center (degree >= 2, all neighbors of degree 1) sends SELECT on port 1
    and REJECT elsewhere. A degree-1 node outputs 1 iff it got SELECT.
    """
    return NodeProgram(
        name="single_leaf",
        model_class=ModelKind.VVC,
        rounds=2,
        init=lambda feature, degree: _LeafState(degree=degree),
        send=_leaf_send,
        receive=_leaf_receive,
        finish=lambda state: 1 if state.selected else 0,
        alphabet=_leaf_alphabet,
    )


def constant_program(label: Hashable = 1, model_class: ModelKind = ModelKind.VVC) -> NodeProgram:
    """Zero-round program outputting `label` everywhere."""
    return NodeProgram(
        name="constant",
        model_class=model_class,
        rounds=0,
        init=lambda feature, degree: None,
        send=lambda state: None,
        receive=lambda state, received: state,
        finish=lambda state: label,
    )


def identity_program(model_class: ModelKind = ModelKind.VVC) -> NodeProgram:
    """Zero-round program whose output is the node's input feature."""
    return NodeProgram(
        name="identity",
        model_class=model_class,
        rounds=0,
        init=lambda feature, degree: feature,
        send=lambda state: None,
        receive=lambda state, received: state,
        finish=lambda state: state,
    )


def wrap_gnn_as_program(m: GNNModel, output: str = "label") -> NodeProgram:
    """Run a CPNGNN as a VV_C(1) algorithm with L rounds.

    In round l node v sends (z_v^{(l)}, i) on each port i and updates its
    embedding with the same kernel as the direct forward pass, so outputs
    agree exactly.

    Args:
        m: VVC-class model
        output: `label` for the argmax label, `vector` for the readout vector

    Returns:
        VVC NodeProgram whose inputs are feature rows
    """
    if m.kind is not ModelKind.VVC:
        raise InvalidParams(f"only VVC models run as VV_C(1) programs, got {m.kind.value}")
    if output not in ("label", "vector"):
        raise InvalidParams(f"output must be 'label' or 'vector', got {output!r}")
    widths = set(m.embedding_widths)

    def alphabet(message: Any) -> bool:
        if not (isinstance(message, tuple) and len(message) == 2):
            return False
        embedding, port = message
        return (
            isinstance(embedding, torch.Tensor)
            and embedding.dtype == DTYPE
            and embedding.dim() == 1
            and embedding.shape[0] in widths
            and isinstance(port, int)
            and 1 <= port <= m.delta
        )

    def send(state: Tuple[int, torch.Tensor, int]) -> List[Tuple[torch.Tensor, int]]:
        _, z, degree = state
        return [(z, i) for i in range(1, degree + 1)]

    def receive(state: Tuple[int, torch.Tensor, int], received: Sequence) -> Tuple[int, torch.Tensor, int]:
        layer, z, degree = state
        port_inputs = [None if entry is None else (entry[0][0], entry[1]) for entry in received]
        with torch.no_grad():
            updated = cpngnn_update(m.weights[layer], z, port_inputs)
        return layer + 1, updated, degree

    def finish(state: Tuple[int, torch.Tensor, int]) -> Hashable:
        with torch.no_grad():
            vector = m.readout_vector(state[1])
        if output == "vector":
            return tuple(vector.tolist())
        return readout(vector)

    return NodeProgram(
        name="gnn",
        model_class=ModelKind.VVC,
        rounds=m.num_layers,
        init=lambda feature, degree: (0, feature, degree),
        send=send,
        receive=receive,
        finish=finish,
        alphabet=alphabet,
        delta=m.delta,
    )
