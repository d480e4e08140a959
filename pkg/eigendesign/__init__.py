"""Eigenvalue optimal design by homogenization: solvers, optimizer and verification tools."""

__version__ = "0.1.0"
