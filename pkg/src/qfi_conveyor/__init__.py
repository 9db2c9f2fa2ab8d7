"""Quantum Fisher information transfer through Ising spin chains."""

__version__ = "0.1.0"
