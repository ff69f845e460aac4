"""Elastic interface in 2D periodic Stokes flow: spectral IB solvers and
semi-implicit time integrators."""

__version__ = "0.1.0"
