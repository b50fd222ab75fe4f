"""Exception hierarchy shared by every portgnn module."""


class PortGNNError(Exception):
    """Base class for all portgnn errors."""


class GraphError(PortGNNError, ValueError):
    """A graph (or a value defined on a graph) violates a structural requirement."""


class InvalidEdge(GraphError):
    """Edge is a self-loop or is not a pair of nodes."""


class DuplicateEdge(GraphError):
    """The same unordered pair appears twice in an edge list."""


class InvalidNode(GraphError):
    """Node id outside 1..n."""


class NoWeakColoring(GraphError):
    """Graph has an isolated node, so no weak 2-coloring exists."""


class NotBipartite(GraphError):
    """Graph has an odd cycle, so no proper 2-coloring exists."""


class NotAStar(GraphError):
    """Operation only defined on star graphs K_{1,k}, k >= 2."""


class IsolatedNode(GraphError):
    """Neighbor aggregation requested for a node without neighbors."""


class DegreeBoundExceeded(GraphError):
    """A node has more neighbors than the degree bound allows."""


class InvalidParams(PortGNNError, ValueError):
    """Generator, model or configuration parameters are infeasible."""


class InvalidColoring(PortGNNError, ValueError):
    """Coloring is missing or does not satisfy the requested feature spec."""


class InvalidEdgeLabels(PortGNNError, ValueError):
    """Per-port edge output bits are malformed."""


class ShapeError(PortGNNError, ValueError):
    """Tensor widths do not chain through the model."""


class FormatError(PortGNNError, ValueError):
    """A graph, checkpoint or experiment file cannot be decoded."""


class AlphabetViolation(PortGNNError):
    """A node program emitted a message outside its declared alphabet."""


class NumericalError(PortGNNError, ArithmeticError):
    """A gradient or loss became NaN or infinite."""


class TooLarge(PortGNNError):
    """Instance exceeds an exact solver's enumeration cap."""


class Undefined(PortGNNError, ArithmeticError):
    """Approximation ratio is undefined for the given sizes."""
