"""Hyperdimensional classification on binary hypervectors."""
