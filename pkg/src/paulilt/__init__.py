"""Radial-mode spectral toolkit for 2D Pauli operators with radial fields.

Subpackages and modules
-----------------------
specfun      modified Bessel primitives (compiled core + NumPy fallback)
field        radial field profiles, flux, and the log-potential h
operators    P1 finite-element assembly of the radial mode operators
spectral     eigenvalue extraction, Riesz means, heat diagonal, coupling scans
greenkernel  closed-form resolvent and kernel-envelope sweeps
verify       end-to-end quantitative checks (bounds, asymptotics, failures)
cli          command-line entry point (``paulilt``)
"""

__version__ = "0.1.0"
