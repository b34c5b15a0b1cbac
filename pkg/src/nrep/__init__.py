"""Fermionic occupation spectra, generalized Pauli constraints, pinning
analysis, and exact polytope projections at desk scale."""

__version__ = "0.1.0"
