"""SB-, MB- and VV_C-class graph neural networks.

All arithmetic is float64 and is carried out node by node through the
kernels `cpngnn_update`, `mean_update` and `pool_update`, so a node program
that replays a kernel on the same inputs reproduces the forward pass bit
for bit.
"""

from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch import nn

from ..errors import DegreeBoundExceeded, FormatError, InvalidParams, IsolatedNode, ShapeError
from .graph import Graph
from .port_numbering import PortNumbering, port_table

DTYPE = torch.float64

PortInput = Optional[Tuple[torch.Tensor, int]]


class ModelKind(Enum):
    """GNN class, named after the matching local computation model."""

    SB = "sb"
    MB = "mb"
    VVC = "vvc"


def port_concat(own: torch.Tensor, port_inputs: Sequence[PortInput]) -> torch.Tensor:
    """Concat(z_v, z_tail(v,1), p_n(v,1), ..., z_tail(v,Δ), p_n(v,Δ)).

    A missing port (None) contributes a zero embedding and back-port 0.
    """
    width = own.shape[0]
    pieces = [own]
    for entry in port_inputs:
        if entry is None:
            pieces.append(torch.zeros(width + 1, dtype=DTYPE))
        else:
            embedding, back_port = entry
            pieces.append(embedding)
            pieces.append(torch.tensor([float(back_port)], dtype=DTYPE))
    return torch.cat(pieces)


def cpngnn_update(
    weight: torch.Tensor, own: torch.Tensor, port_inputs: Sequence[PortInput]
) -> torch.Tensor:
    """One CPNGNN layer for one node: ReLU(W · port_concat)."""
    return torch.relu(torch.mv(weight, port_concat(own, port_inputs)))


def mean_update(
    weight: torch.Tensor, own: torch.Tensor, neighbor_embeddings: Sequence[torch.Tensor]
) -> torch.Tensor:
    """GraphSAGE-mean layer for one node: Concat(z_v, mean_u W z_u)."""
    transformed = torch.stack([torch.mv(weight, z) for z in neighbor_embeddings])
    return torch.cat([own, transformed.mean(dim=0)])


def pool_update(
    weight: torch.Tensor, bias: torch.Tensor, neighbor_embeddings: Sequence[torch.Tensor]
) -> torch.Tensor:
    """GraphSAGE-pool layer for one node: elementwise max_u σ(W z_u + b)."""
    transformed = torch.stack([torch.sigmoid(torch.mv(weight, z) + bias) for z in neighbor_embeddings])
    return transformed.amax(dim=0)


def readout(z: torch.Tensor) -> int:
    """Index of the maximum element, ties broken toward the lowest index.

    Args:
        z: Nonempty readout vector

    Returns:
        0-based label index
    """
    values = z.detach().tolist()
    if not values:
        raise ShapeError("readout of an empty vector")
    best = 0
    for index, value in enumerate(values):
        if value > values[best]:
            best = index
    return best


class GNNModel(nn.Module):
    """Layer stack of one GNN class followed by a readout perceptron.

    Weight shapes per layer l (d_l is the embedding width entering layer l):

    - VVC: W is d_{l+1} x (d_l + Δ(d_l + 1))
    - MB:  W is h_l x d_l and d_{l+1} = d_l + h_l
    - SB:  W is d_{l+1} x d_l with bias b of width d_{l+1}

    The readout is Linear -> ReLU -> Linear with final width = number of labels.
    """

    def __init__(
        self,
        kind: ModelKind,
        delta: int,
        input_width: int,
        layer_widths: Sequence[int] = (16, 16),
        num_labels: int = 2,
        readout_hidden: Optional[int] = None,
        features: str = "degree",
    ):
        """Initialize a model with zero parameters.

        Args:
            kind: GNN class
            delta: Degree bound Δ
            input_width: Feature width d_1
            layer_widths: Output width of each layer (for MB, the width h_l of W z_u)
            num_labels: Size of the label set Y
            readout_hidden: Hidden width of the readout (max(16, 2·d_{L+1}) if None)
            features: Feature spec the model expects, recorded in checkpoints
        """
        super().__init__()
        if delta < 1 or input_width < 1 or num_labels < 1:
            raise InvalidParams("delta, input_width and num_labels must be positive")
        if any(w < 1 for w in layer_widths):
            raise InvalidParams(f"layer widths must be positive, got {list(layer_widths)}")

        self.kind = ModelKind(kind)
        self.delta = int(delta)
        self.features = features
        self.num_labels = int(num_labels)

        widths = [int(input_width)]
        weights = []
        biases = []
        for out in layer_widths:
            d = widths[-1]
            if self.kind is ModelKind.VVC:
                weights.append(nn.Parameter(torch.zeros(out, d + self.delta * (d + 1), dtype=DTYPE)))
                widths.append(out)
            elif self.kind is ModelKind.MB:
                weights.append(nn.Parameter(torch.zeros(out, d, dtype=DTYPE)))
                widths.append(d + out)
            else:
                weights.append(nn.Parameter(torch.zeros(out, d, dtype=DTYPE)))
                biases.append(nn.Parameter(torch.zeros(out, dtype=DTYPE)))
                widths.append(out)
        self.weights = nn.ParameterList(weights)
        self.biases = nn.ParameterList(biases)
        self.embedding_widths: Tuple[int, ...] = tuple(widths)

        final = widths[-1]
        hidden = int(readout_hidden) if readout_hidden else max(16, 2 * final)
        self.readout_mlp = nn.Sequential(
            nn.Linear(final, hidden, dtype=DTYPE),
            nn.ReLU(),
            nn.Linear(hidden, self.num_labels, dtype=DTYPE),
        )
        with torch.no_grad():
            for param in self.readout_mlp.parameters():
                param.zero_()

    @property
    def num_layers(self) -> int:
        """Number of message-passing layers L."""
        return len(self.weights)

    @property
    def input_width(self) -> int:
        """Feature width d_1."""
        return self.embedding_widths[0]

    def layer_widths(self) -> List[int]:
        """Constructor `layer_widths` recovered from the weights."""
        return [int(w.shape[0]) for w in self.weights]

    def readout_hidden(self) -> int:
        """Hidden width of the readout perceptron."""
        return int(self.readout_mlp[0].out_features)

    def initialize_uniform(self, rng: np.random.Generator, low: float = -0.1, high: float = 0.1) -> None:
        """Draw every parameter from uniform(low, high) in registration order."""
        with torch.no_grad():
            for param in self.parameters():
                values = rng.uniform(low, high, size=tuple(param.shape))
                param.copy_(torch.from_numpy(np.asarray(values, dtype=np.float64)))

    def readout_vector(self, z: torch.Tensor) -> torch.Tensor:
        """Apply the readout perceptron to one final embedding."""
        return self.readout_mlp(z)

    def check_inputs(self, g: Graph, x: torch.Tensor) -> None:
        """Validate feature shape and degree bound.

        Raises:
            ShapeError: If x is not n x d_1
            DegreeBoundExceeded: If g exceeds the model's Δ
        """
        if x.dim() != 2 or tuple(x.shape) != (g.n, self.input_width):
            raise ShapeError(
                f"features must be {g.n} x {self.input_width}, got {tuple(x.shape)}"
            )
        if g.max_degree > self.delta:
            raise DegreeBoundExceeded(f"graph max degree {g.max_degree} exceeds Δ={self.delta}")

    def embeddings(
        self, g: Graph, p: Optional[PortNumbering], x: torch.Tensor
    ) -> List[torch.Tensor]:
        """Final embeddings z_v^{(L+1)}, one tensor per node in id order."""
        self.check_inputs(g, x)
        z = [x[v - 1] for v in g.nodes]
        if self.kind is ModelKind.VVC:
            if p is None:
                raise InvalidParams("CPNGNN needs a port numbering")
            table = port_table(g, p, self.delta)
            for weight in self.weights:
                z = [
                    cpngnn_update(
                        weight,
                        z[v - 1],
                        [None if tail is None else (z[tail - 1], back) for tail, back in table[v - 1]],
                    )
                    for v in g.nodes
                ]
            return z

        isolated = [v for v in g.nodes if g.degree(v) == 0]
        if isolated and self.num_layers:
            raise IsolatedNode(f"nodes {isolated} have no neighbors to aggregate")
        for index, weight in enumerate(self.weights):
            if self.kind is ModelKind.MB:
                z = [mean_update(weight, z[v - 1], [z[u - 1] for u in g.neighbors(v)]) for v in g.nodes]
            else:
                bias = self.biases[index]
                z = [pool_update(weight, bias, [z[u - 1] for u in g.neighbors(v)]) for v in g.nodes]
        return z

    def forward(self, g: Graph, p: Optional[PortNumbering], x: torch.Tensor) -> torch.Tensor:
        """Readout vectors for every node, shape n x |Y|."""
        z = self.embeddings(g, p, x)
        if not z:
            return torch.zeros(0, self.num_labels, dtype=DTYPE)
        return torch.stack([self.readout_vector(z_v) for z_v in z])

    def predict(self, g: Graph, p: Optional[PortNumbering], x: torch.Tensor) -> Tuple[int, ...]:
        """Greedy labels (argmax of each readout vector)."""
        with torch.no_grad():
            logits = self.forward(g, p, x)
        return tuple(readout(row) for row in logits)

    def to_checkpoint(self) -> Dict:
        """Encode shapes and exact parameter values as a JSON-ready dictionary.

        Values are hex-float strings so that a round trip is bit-exact.
        """
        return {
            "kind": self.kind.value,
            "delta": self.delta,
            "features": self.features,
            "input_width": self.input_width,
            "layer_widths": self.layer_widths(),
            "num_labels": self.num_labels,
            "readout_hidden": self.readout_hidden(),
            "parameters": {
                name: _encode_tensor(param) for name, param in self.named_parameters()
            },
        }

    @classmethod
    def from_checkpoint(cls, data: Dict) -> "GNNModel":
        """Rebuild a model from `to_checkpoint` output.

        Raises:
            FormatError: If fields are missing or a tensor shape disagrees
        """
        try:
            model = cls(
                ModelKind(data["kind"]),
                int(data["delta"]),
                int(data["input_width"]),
                [int(w) for w in data["layer_widths"]],
                num_labels=int(data["num_labels"]),
                readout_hidden=int(data["readout_hidden"]),
                features=data.get("features", "degree"),
            )
            stored = data["parameters"]
            with torch.no_grad():
                for name, param in model.named_parameters():
                    param.copy_(_decode_tensor(stored[name], tuple(param.shape)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed model checkpoint: {exc}") from exc
        return model

    def __repr__(self) -> str:
        return (
            f"GNNModel(kind={self.kind.value}, delta={self.delta}, "
            f"widths={list(self.embedding_widths)}, labels={self.num_labels})"
        )


def _encode_tensor(tensor: torch.Tensor) -> Dict:
    return {
        "shape": list(tensor.shape),
        "values": [float(v).hex() for v in tensor.detach().reshape(-1).tolist()],
    }


def _decode_tensor(data: Dict, expected_shape: Tuple[int, ...]) -> torch.Tensor:
    shape = tuple(int(s) for s in data["shape"])
    if shape != expected_shape:
        raise ShapeError(f"stored shape {shape} does not match model shape {expected_shape}")
    values = [float.fromhex(v) for v in data["values"]]
    return torch.tensor(values, dtype=DTYPE).reshape(shape)


def build_model(
    kind: ModelKind,
    delta: int,
    input_width: int,
    rng: np.random.Generator,
    layer_widths: Sequence[int] = (16, 16),
    num_labels: int = 2,
    readout_hidden: Optional[int] = None,
    features: str = "degree",
    init_scale: float = 0.1,
) -> GNNModel:
    """Create a model with parameters drawn from uniform(-init_scale, init_scale)."""
    model = GNNModel(kind, delta, input_width, layer_widths, num_labels, readout_hidden, features)
    model.initialize_uniform(rng, -init_scale, init_scale)
    return model


def _require_kind(m: GNNModel, kind: ModelKind) -> None:
    if m.kind is not kind:
        raise InvalidParams(f"expected a {kind.value} model, got {m.kind.value}")


def cpngnn_forward(m: GNNModel, g: Graph, p: PortNumbering, x: torch.Tensor) -> torch.Tensor:
    """CPNGNN forward pass: per-node readout vectors (n x |Y|)."""
    _require_kind(m, ModelKind.VVC)
    return m(g, p, x)


def mbgnn_forward(m: GNNModel, g: Graph, x: torch.Tensor) -> torch.Tensor:
    """GraphSAGE-mean forward pass: per-node readout vectors."""
    _require_kind(m, ModelKind.MB)
    return m(g, None, x)


def sbgnn_forward(m: GNNModel, g: Graph, x: torch.Tensor) -> torch.Tensor:
    """GraphSAGE-pool forward pass: per-node readout vectors."""
    _require_kind(m, ModelKind.SB)
    return m(g, None, x)
