"""Utilities package for generators, file formats and logging."""
