"""Tests for simulator and node_program modules."""

import unittest

import numpy as np
import torch

from src.controllers.simulator import Simulator, run_rounds, verify_single_leaf
from src.errors import AlphabetViolation, InvalidParams, NotAStar
from src.models.features import DEGREE, node_features
from src.models.gnn import ModelKind, build_model
from src.models.graph import Graph, disjoint_union
from src.models.node_program import (
    SELECT,
    Labeling,
    NodeProgram,
    constant_program,
    identity_program,
    single_leaf_program,
    wrap_gnn_as_program,
)
from src.models.port_numbering import (
    PortNumbering,
    consistent_port_numbering,
    distinct_port_numberings,
    shuffled_port_numbering,
)
from src.utils.generators import cycle, path, random_bounded, star


def _features(x):
    return [x[v] for v in range(x.shape[0])]


class TestSingleLeafProgram(unittest.TestCase):
    """Test cases for the single-leaf node program."""

    def test_star_any_numbering(self):
        """Test exactly one leaf is selected under every sampled numbering."""
        for k in range(2, 7):
            g = star(k)
            for p in distinct_port_numberings(g, 10, np.random.default_rng(k)):
                labels = run_rounds(g, p, single_leaf_program())
                self.assertTrue(verify_single_leaf(g, labels))
                self.assertEqual(len(labels.selected()), 1)

    def test_select_uses_port_one(self):
        """Test the selected leaf sits on the center's port 1."""
        g = star(3)
        p = shuffled_port_numbering(g, 2)
        labels = run_rounds(g, p, single_leaf_program())
        self.assertEqual(labels.selected(), (p(1, 1)[0],))

    def test_path_of_three(self):
        """Test K_1,2 selects one endpoint."""
        g = path(3)
        labels = run_rounds(g, consistent_port_numbering(g), single_leaf_program())
        self.assertIn(labels.selected(), ((1,), (3,)))

    def test_triangle_terminates(self):
        """Test a non-star input runs without error."""
        g = cycle(3)
        labels = run_rounds(g, consistent_port_numbering(g), single_leaf_program())
        self.assertEqual(len(labels), 3)

    def test_step_composes_receive_and_send(self):
        """Test step against the separate calls."""
        prog = single_leaf_program()
        state = prog.init(1, 3)
        received = [(1, 1), (1, 1), (1, 1)]
        new_state, outgoing = prog.step(state, received)
        self.assertEqual(outgoing, [SELECT, "reject", "reject"])
        self.assertEqual(new_state, prog.receive(state, received))


class TestSimulator(unittest.TestCase):
    """Test cases for round execution."""

    def test_identity(self):
        """Test a zero-round program returns its inputs."""
        g = cycle(6)
        self.assertEqual(run_rounds(g, None, identity_program(ModelKind.MB)).labels, g.degrees)
        self.assertEqual(run_rounds(g, None, identity_program(ModelKind.MB), ["a"] * 6).labels, ("a",) * 6)

    def test_constant(self):
        """Test the constant program on the triangle."""
        g = cycle(3)
        self.assertEqual(run_rounds(g, consistent_port_numbering(g), constant_program(1)), [1, 1, 1])

    def test_alphabet_violation(self):
        """Test a message outside the alphabet is refused."""
        prog = NodeProgram(
            name="loud",
            model_class=ModelKind.MB,
            rounds=1,
            init=lambda feature, degree: degree,
            send=lambda state: -state,
            receive=lambda state, received: state,
            finish=lambda state: state,
            alphabet=lambda message: isinstance(message, int) and message >= 0,
        )
        with self.assertRaises(AlphabetViolation):
            run_rounds(path(3), None, prog)

    def test_vvc_needs_consistent_ports(self):
        """Test VVC programs refuse missing or broken numberings."""
        g = Graph(3, [(1, 2), (1, 3)])
        broken = PortNumbering({(1, 1): (2, 1), (1, 2): (3, 1), (2, 1): (1, 2), (3, 1): (1, 1)})
        with self.assertRaises(InvalidParams):
            Simulator(g, None, single_leaf_program())
        with self.assertRaises(InvalidParams):
            Simulator(g, broken, single_leaf_program())

    def test_broadcast_inboxes(self):
        """Test MB receives a multiset and SB a set."""
        g = star(3)

        def collector(kind):
            return NodeProgram(
                name="collect",
                model_class=kind,
                rounds=1,
                init=lambda feature, degree: (feature, None),
                send=lambda state: state[0],
                receive=lambda state, received: (state[0], received),
                finish=lambda state: state[1],
            )

        features = [0, 5, 5, 7]
        mb = run_rounds(g, None, collector(ModelKind.MB), features)
        sb = run_rounds(g, None, collector(ModelKind.SB), features)
        self.assertEqual(mb[1], (5, 5, 7))
        self.assertEqual(sb[1], (5, 7))
        self.assertEqual(mb[2], (0,))

    def test_broadcast_ignores_ports(self):
        """Test MB output does not depend on the port numbering."""
        g = random_bounded(9, 3, seed=1)
        prog = NodeProgram(
            name="sum",
            model_class=ModelKind.MB,
            rounds=2,
            init=lambda feature, degree: degree,
            send=lambda state: state,
            receive=lambda state, received: state + sum(received),
            finish=lambda state: state,
        )
        first = run_rounds(g, consistent_port_numbering(g), prog)
        second = run_rounds(g, shuffled_port_numbering(g, 3), prog)
        self.assertEqual(first, second)

    def test_workers_do_not_change_output(self):
        """Test threaded rounds merge by node id."""
        g = random_bounded(12, 3, seed=5)
        p = shuffled_port_numbering(g, 1)
        m = build_model(ModelKind.VVC, 3, 3, np.random.default_rng(0), (8, 8))
        inputs = _features(node_features(g, DEGREE, 3))
        prog = wrap_gnn_as_program(m, output="vector")
        self.assertEqual(run_rounds(g, p, prog, inputs), run_rounds(g, p, prog, inputs, workers=4))

    def test_round_locality(self):
        """Test two copies of a ported graph get the same labels."""
        g = random_bounded(8, 3, seed=4)
        p = shuffled_port_numbering(g, 9)
        union = disjoint_union(g, g)
        q = p.disjoint_union(p, g.n)
        m = build_model(ModelKind.VVC, 3, 3, np.random.default_rng(2), (8, 8))
        inputs = _features(node_features(union, DEGREE, 3))
        labels = run_rounds(union, q, wrap_gnn_as_program(m, output="vector"), inputs)
        for v in g.nodes:
            self.assertEqual(labels[v], labels[v + g.n])


class TestWrappedGNN(unittest.TestCase):
    """Test cases for running a CPNGNN as a node program."""

    def _assert_equivalent(self, g, p, seed, widths=(16, 16)):
        delta = max(g.max_degree, 1)
        m = build_model(ModelKind.VVC, delta, delta, np.random.default_rng(seed), widths)
        x = node_features(g, DEGREE, delta)
        direct = m(g, p, x).detach()
        vectors = run_rounds(g, p, wrap_gnn_as_program(m, output="vector"), _features(x))
        for v in g.nodes:
            self.assertEqual(vectors[v], tuple(direct[v - 1].tolist()))
        labels = run_rounds(g, p, wrap_gnn_as_program(m), _features(x))
        self.assertEqual(labels.labels, m.predict(g, p, x))

    def test_star(self):
        """Test equality on K_1,3 over 100 weight draws."""
        g = star(3)
        p = consistent_port_numbering(g)
        for seed in range(100):
            self._assert_equivalent(g, p, seed)

    def test_cycle(self):
        """Test equality on the 5-cycle."""
        g = cycle(5)
        for seed in range(20):
            self._assert_equivalent(g, shuffled_port_numbering(g, seed), seed)

    def test_random_graphs(self):
        """Test equality on random graphs and numberings."""
        rng = np.random.default_rng(17)
        for trial in range(100):
            n = int(rng.integers(2, 13))
            delta = int(rng.integers(2, 5))
            g = random_bounded(n, delta, seed=rng)
            p = shuffled_port_numbering(g, rng)
            self._assert_equivalent(g, p, trial, widths=(8, 8))

    def test_needs_vvc_model(self):
        """Test broadcast models are refused."""
        m = build_model(ModelKind.MB, 3, 3, np.random.default_rng(0))
        with self.assertRaises(InvalidParams):
            wrap_gnn_as_program(m)

    def test_messages_in_alphabet(self):
        """Test the alphabet predicate of the wrapped program."""
        m = build_model(ModelKind.VVC, 3, 3, np.random.default_rng(0), (4,))
        prog = wrap_gnn_as_program(m)
        self.assertTrue(prog.accepts((torch.zeros(3, dtype=torch.float64), 2)))
        self.assertFalse(prog.accepts((torch.zeros(5, dtype=torch.float64), 2)))
        self.assertFalse(prog.accepts((torch.zeros(3, dtype=torch.float64), 4)))
        self.assertFalse(prog.accepts("select"))


class TestVerifySingleLeaf(unittest.TestCase):
    """Test cases for the single-leaf checker."""

    def test_examples(self):
        """Test accepted and rejected labelings of K_1,3."""
        g = star(3)
        self.assertTrue(verify_single_leaf(g, Labeling([0, 1, 0, 0])))
        self.assertFalse(verify_single_leaf(g, Labeling([1, 0, 0, 0])))
        self.assertFalse(verify_single_leaf(g, Labeling([0, 1, 1, 0])))
        self.assertFalse(verify_single_leaf(g, Labeling([0, 0, 0, 0])))

    def test_not_a_star(self):
        """Test non-stars are refused."""
        with self.assertRaises(NotAStar):
            verify_single_leaf(cycle(4), Labeling([0, 1, 0, 0]))


if __name__ == "__main__":
    unittest.main()
