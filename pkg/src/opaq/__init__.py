"""Exact-arithmetic engine for operadic homological algebra.

Truncated operads and cooperads over the rationals, bar/cobar
constructions, Koszul dual cooperads, twisted cotangent complexes of
finite-dimensional algebras, Andre-Quillen cohomology, and the
obstruction module whose homology decides (at truncation scale) whether
that cohomology is an Ext-functor.
"""

__version__ = "0.1.0"
