"""Measurement-protected quantum memory toolkit.

Symbolic Pauli checks for when repeated unread measurements freeze logical
operators, dense density-matrix simulation of the interleaved
noise/measurement dynamics, a three-qubit protected-memory protocol, and a
noisy-Ising realization of the parity measurement.
"""

__version__ = "0.1.0"
