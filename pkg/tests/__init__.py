"""Tests package for portgnn."""
