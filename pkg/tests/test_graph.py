"""Tests for graph module."""

import unittest

import networkx as nx
import numpy as np

from src.errors import DegreeBoundExceeded, DuplicateEdge, InvalidEdge, InvalidNode, InvalidParams
from src.models.graph import DegreeBound, Graph, build_graph, disjoint_union, relabel


class TestGraph(unittest.TestCase):
    """Test cases for Graph class."""

    def test_star_degrees(self):
        """Test the four-node star."""
        g = build_graph(4, [(1, 2), (1, 3), (1, 4)])
        self.assertEqual(g.n, 4)
        self.assertEqual(g.m, 3)
        self.assertEqual(g.degree(1), 3)
        self.assertEqual([g.degree(v) for v in (2, 3, 4)], [1, 1, 1])
        self.assertTrue(g.is_star())
        self.assertEqual(g.star_center(), 1)

    def test_single_isolated_node(self):
        """Test a graph with one node and no edges."""
        g = build_graph(1, [])
        self.assertEqual(g.degree(1), 0)
        self.assertEqual(g.edges, ())
        self.assertEqual(g.max_degree, 0)
        self.assertFalse(g.is_star())

    def test_triangle(self):
        """Test the complete graph on three nodes."""
        g = build_graph(3, [(1, 2), (2, 3), (1, 3)])
        self.assertEqual(g.degrees, (2, 2, 2))
        self.assertEqual(g.edges, ((1, 2), (1, 3), (2, 3)))

    def test_canonical_order(self):
        """Test that edges are normalized regardless of input order."""
        g = Graph(4, [(4, 1), (3, 2), (2, 1)])
        self.assertEqual(g.edges, ((1, 2), (1, 4), (2, 3)))
        self.assertEqual(g.neighbors(1), (2, 4))

    def test_symmetric_adjacency(self):
        """Test u in N(v) iff v in N(u)."""
        g = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (2, 4)])
        for v in g.nodes:
            for u in g.neighbors(v):
                self.assertIn(v, g.neighbors(u))
                self.assertTrue(g.has_edge(u, v))

    def test_invalid_edges(self):
        """Test error cases of graph construction."""
        with self.assertRaises(InvalidEdge):
            Graph(3, [(2, 2)])
        with self.assertRaises(DuplicateEdge):
            Graph(3, [(1, 2), (2, 1)])
        with self.assertRaises(InvalidNode):
            Graph(3, [(1, 4)])
        with self.assertRaises(InvalidParams):
            Graph(-1)
        with self.assertRaises(InvalidParams):
            Graph(3.0)
        with self.assertRaises(InvalidNode):
            Graph(3, [(1.7, 2)])
        with self.assertRaises(InvalidNode):
            Graph(3, [(True, 2)])
        self.assertEqual(Graph(np.int64(3), [(np.int64(1), np.int64(2))]).edges, ((1, 2),))

    def test_components(self):
        """Test components are ordered by their lowest node id."""
        g = Graph(6, [(5, 6), (1, 3), (2, 4)])
        self.assertEqual(g.components(), [(1, 3), (2, 4), (5, 6)])

    def test_dict_round_trip(self):
        """Test serialization keeps the graph."""
        g = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
        self.assertEqual(Graph.from_dict(g.to_dict()), g)

    def test_to_networkx(self):
        """Test conversion to networkx."""
        g = Graph(4, [(1, 2), (2, 3)])
        converted = g.to_networkx()
        self.assertEqual(converted.number_of_nodes(), 4)
        self.assertTrue(converted.has_edge(3, 2))
        self.assertEqual(nx.number_connected_components(converted), len(g.components()))

    def test_disjoint_union_and_relabel(self):
        """Test union shifts ids and relabel is an isomorphism."""
        g = Graph(3, [(1, 2), (2, 3)])
        union = disjoint_union(g, g)
        self.assertEqual(union.n, 6)
        self.assertEqual(union.edges, ((1, 2), (2, 3), (4, 5), (5, 6)))

        renamed = relabel(g, {1: 3, 2: 1, 3: 2})
        self.assertEqual(renamed.edges, ((1, 2), (1, 3)))
        with self.assertRaises(InvalidParams):
            relabel(g, {1: 1, 2: 1, 3: 2})


class TestDegreeBound(unittest.TestCase):
    """Test cases for DegreeBound class."""

    def test_admits(self):
        """Test the degree bound check."""
        g = Graph(4, [(1, 2), (1, 3), (1, 4)])
        self.assertTrue(DegreeBound(3).admits(g))
        self.assertFalse(DegreeBound(2).admits(g))
        with self.assertRaises(DegreeBoundExceeded):
            DegreeBound(2).check(g)
        with self.assertRaises(InvalidParams):
            DegreeBound(0)


if __name__ == "__main__":
    unittest.main()
