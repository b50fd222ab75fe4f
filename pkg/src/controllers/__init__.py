"""Controllers package for simulation, training and experiments."""
