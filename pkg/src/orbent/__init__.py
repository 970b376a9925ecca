"""Orbital correlation and entanglement from simulated grouped Pauli measurements."""
__version__ = "0.1.0"
