"""Models package for graphs, port numberings, GNNs and exact oracles."""
