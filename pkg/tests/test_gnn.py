"""Tests for gnn and features modules."""

import unittest

import numpy as np
import torch

from src.errors import (
    DegreeBoundExceeded,
    InvalidColoring,
    InvalidEdgeLabels,
    InvalidParams,
    IsolatedNode,
    ShapeError,
)
from src.controllers.simulator import verify_single_leaf
from src.models.coloring import Coloring, weak_two_coloring
from src.models.features import (
    DEGREE,
    DEGREE_2COLOR,
    DEGREE_WEAK2,
    EdgePortLabels,
    decode_edge_output,
    feature_width,
    node_features,
)
from src.models.gnn import (
    GNNModel,
    ModelKind,
    build_model,
    cpngnn_forward,
    mbgnn_forward,
    readout,
    sbgnn_forward,
)
from src.models.graph import Graph, disjoint_union, relabel
from src.models.node_program import Labeling
from src.models.port_numbering import consistent_port_numbering, shuffled_port_numbering
from src.utils.generators import cycle, path, random_bounded, star


def _model(kind, delta, seed, widths=(16, 16), spec=DEGREE):
    return build_model(kind, delta, feature_width(spec, delta), np.random.default_rng(seed), widths, features=spec)


class TestReadout(unittest.TestCase):
    """Test cases for the argmax readout."""

    def test_examples(self):
        """Test maximum index and tie-break."""
        self.assertEqual(readout(torch.tensor([0.1, 0.9])), 1)
        self.assertEqual(readout(torch.tensor([0.5, 0.5])), 0)
        self.assertEqual(readout(torch.tensor([-1.0, -2.0, -0.5])), 2)

    def test_empty(self):
        """Test an empty vector is rejected."""
        with self.assertRaises(ShapeError):
            readout(torch.tensor([]))


class TestNodeFeatures(unittest.TestCase):
    """Test cases for feature construction."""

    def test_star_degrees(self):
        """Test one-hot degree rows of K_1,3."""
        x = node_features(star(3), DEGREE, 3)
        self.assertEqual(x[0].tolist(), [0.0, 0.0, 1.0])
        for row in x[1:]:
            self.assertEqual(row.tolist(), [1.0, 0.0, 0.0])

    def test_weak_coloring_bit(self):
        """Test the color bit follows the degree block."""
        g = path(3)
        x = node_features(g, DEGREE_WEAK2, 2, weak_two_coloring(g))
        self.assertEqual(x.tolist(), [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 0.0]])

    def test_invalid_colorings(self):
        """Test colorings that do not fit the feature spec."""
        g = path(3)
        with self.assertRaises(InvalidColoring):
            node_features(g, DEGREE_2COLOR, 2, Coloring([0, 0, 1]))
        with self.assertRaises(InvalidColoring):
            node_features(g, DEGREE_WEAK2, 2)

    def test_degree_bound(self):
        """Test degrees above delta."""
        with self.assertRaises(DegreeBoundExceeded):
            node_features(star(4), DEGREE, 3)
        with self.assertRaises(InvalidParams):
            feature_width("degree+color", 3)


class TestDecodeEdgeOutput(unittest.TestCase):
    """Test cases for per-port edge decisions."""

    def test_single_edge(self):
        """Test all-ones and all-zeros outputs."""
        g = path(2)
        p = consistent_port_numbering(g)
        self.assertEqual(decode_edge_output(g, p, EdgePortLabels.all_ones(g, 1)), ((1, 2),))
        self.assertEqual(decode_edge_output(g, p, EdgePortLabels(g, 1, [[0], [0]])), ())

    def test_star_port_one(self):
        """Test the center keeps only its port-1 edge."""
        g = star(3)
        p = consistent_port_numbering(g)
        y = EdgePortLabels(g, 3, [[1, 0, 0], [1, 0, 0], [1, 0, 0], [1, 0, 0]])
        self.assertEqual(decode_edge_output(g, p, y), ((1, 2),))

    def test_invalid_bits(self):
        """Test bits beyond the degree are rejected."""
        g = star(2)
        with self.assertRaises(InvalidEdgeLabels):
            EdgePortLabels(g, 2, [[1, 1], [1, 1], [1, 0]])
        with self.assertRaises(InvalidEdgeLabels):
            EdgePortLabels(g, 2, [[1, 2], [1, 0], [1, 0]])


class TestCPNGNN(unittest.TestCase):
    """Test cases for the port-numbered GNN."""

    def test_zero_weights(self):
        """Test an all-zero model gives equal outputs everywhere."""
        g = random_bounded(8, 3, seed=2)
        m = GNNModel(ModelKind.VVC, 3, 3, [4])
        z = cpngnn_forward(m, g, consistent_port_numbering(g), node_features(g, DEGREE, 3))
        for row in z:
            self.assertTrue(torch.equal(row, z[0]))

    def test_disjoint_copies(self):
        """Test two copies of a ported graph get identical outputs."""
        g = random_bounded(7, 3, seed=9)
        p = shuffled_port_numbering(g, 4)
        union = disjoint_union(g, g)
        q = p.disjoint_union(p, g.n)
        m = _model(ModelKind.VVC, 3, 1)
        z = cpngnn_forward(m, union, q, node_features(union, DEGREE, 3))
        for v in range(g.n):
            self.assertTrue(torch.equal(z[v], z[v + g.n]))

    def test_star_leaves_differ(self):
        """Test back-ports separate the leaves on center ports 1 and 2."""
        g = star(3)
        p = consistent_port_numbering(g)
        x = node_features(g, DEGREE, 3)
        differ = 0
        for seed in range(100):
            z = cpngnn_forward(_model(ModelKind.VVC, 3, seed), g, p, x)
            differ += int(not torch.equal(z[1], z[2]))
        self.assertGreaterEqual(differ, 95)

    def test_port_isomorphism(self):
        """Test relabeling nodes together with ports permutes the outputs."""
        g = random_bounded(9, 3, seed=3)
        p = shuffled_port_numbering(g, 6)
        perm = [int(v) + 1 for v in np.random.default_rng(0).permutation(g.n)]
        mapping = {v: perm[v - 1] for v in g.nodes}
        h = relabel(g, mapping)
        q = p.relabel(mapping)
        m = _model(ModelKind.VVC, 3, 5)
        z_g = cpngnn_forward(m, g, p, node_features(g, DEGREE, 3))
        z_h = cpngnn_forward(m, h, q, node_features(h, DEGREE, 3))
        for v in g.nodes:
            self.assertTrue(torch.equal(z_g[v - 1], z_h[mapping[v] - 1]))

    def test_weight_shapes(self):
        """Test the declared layer widths."""
        m = GNNModel(ModelKind.VVC, 3, 3, [16, 8])
        self.assertEqual(tuple(m.weights[0].shape), (16, 3 + 3 * 4))
        self.assertEqual(tuple(m.weights[1].shape), (8, 16 + 3 * 17))
        self.assertEqual(m.readout_hidden(), 16)
        self.assertEqual(GNNModel(ModelKind.VVC, 3, 3, [16]).readout_hidden(), 32)

    def test_shape_errors(self):
        """Test wrong features, degrees and kinds."""
        g = star(3)
        p = consistent_port_numbering(g)
        m = _model(ModelKind.VVC, 3, 0)
        with self.assertRaises(ShapeError):
            cpngnn_forward(m, g, p, torch.zeros(4, 2, dtype=torch.float64))
        with self.assertRaises(DegreeBoundExceeded):
            cpngnn_forward(m, star(4), consistent_port_numbering(star(4)), torch.zeros(5, 3, dtype=torch.float64))
        with self.assertRaises(InvalidParams):
            mbgnn_forward(m, g, node_features(g, DEGREE, 3))

    def test_finite(self):
        """Test outputs are finite."""
        g = random_bounded(12, 4, seed=1)
        z = cpngnn_forward(_model(ModelKind.VVC, 4, 2), g, consistent_port_numbering(g), node_features(g, DEGREE, 4))
        self.assertTrue(torch.isfinite(z).all())

    def test_checkpoint_round_trip(self):
        """Test checkpoints restore every parameter bit for bit."""
        m = _model(ModelKind.VVC, 3, 7, widths=(5, 4), spec=DEGREE_WEAK2)
        restored = GNNModel.from_checkpoint(m.to_checkpoint())
        self.assertEqual(restored.features, DEGREE_WEAK2)
        for (name, a), (_, b) in zip(m.named_parameters(), restored.named_parameters()):
            self.assertTrue(torch.equal(a, b), name)


class TestBroadcastModels(unittest.TestCase):
    """Test cases for MB and SB models."""

    def test_leaf_symmetry(self):
        """Test star leaves get bit-identical outputs and never a single-leaf solution."""
        for kind in (ModelKind.MB, ModelKind.SB):
            forward = mbgnn_forward if kind is ModelKind.MB else sbgnn_forward
            for k in (2, 3, 4, 5):
                g = star(k)
                x = node_features(g, DEGREE, k)
                for seed in range(100):
                    m = _model(kind, k, seed, widths=(8, 8))
                    z = forward(m, g, x)
                    for leaf in range(2, k + 1):
                        self.assertTrue(torch.equal(z[1], z[leaf]))
                    labels = Labeling(m.predict(g, None, x))
                    self.assertFalse(verify_single_leaf(g, labels))

    def test_regular_graph(self):
        """Test a regular graph with equal features gives equal outputs."""
        g = cycle(6)
        x = node_features(g, DEGREE, 2)
        for kind, forward in ((ModelKind.MB, mbgnn_forward), (ModelKind.SB, sbgnn_forward)):
            z = forward(_model(kind, 2, 4), g, x)
            for row in z:
                self.assertTrue(torch.equal(row, z[0]))

    def test_mb_widths(self):
        """Test MB layers concatenate the node's own embedding."""
        m = GNNModel(ModelKind.MB, 3, 3, [4, 5])
        self.assertEqual(m.embedding_widths, (3, 7, 12))

    def test_sb_set_semantics(self):
        """Test a repeated neighbor value does not change the pooled embedding."""
        g1 = Graph(5, [(1, 2), (1, 3), (1, 4), (4, 5)])
        g2 = Graph(4, [(1, 2), (1, 3), (3, 4)])
        m = _model(ModelKind.SB, 3, 8, widths=(6,))
        z1 = sbgnn_forward(m, g1, node_features(g1, DEGREE, 3))
        z2 = sbgnn_forward(m, g2, node_features(g2, DEGREE, 3))
        self.assertTrue(torch.equal(z1[0], z2[0]))

    def test_sb_zero_weights(self):
        """Test zero weights pool sigmoid(b) everywhere."""
        g = random_bounded(6, 3, seed=0)
        m = _model(ModelKind.SB, 3, 1, widths=(4,))
        with torch.no_grad():
            m.weights[0].zero_()
        z = sbgnn_forward(m, g, node_features(g, DEGREE, 3))
        for row in z:
            self.assertTrue(torch.equal(row, z[0]))

    def test_isolated_node(self):
        """Test broadcast models need a neighbor at every node."""
        g = Graph(3, [(1, 2)])
        with self.assertRaises(IsolatedNode):
            mbgnn_forward(_model(ModelKind.MB, 1, 0), g, node_features(g, DEGREE, 1))


if __name__ == "__main__":
    unittest.main()
