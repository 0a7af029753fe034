"""Solvers combinatorios de caja negra diferenciables."""
