"""Cohomology of congruence subgroups of SL2(Z): resolutions with
contracting homotopies, chain-complex reduction, Hecke operators, cuspidal
cohomology, and quadratic integer rings."""

__version__ = "0.1.0"
