"""Exact constructions for locally trivial bundles over finite-dimensional algebras.

Coverings and their completions, bundles glued from transition maps,
associated bundles from Hopf-algebra transition functions, and
connections with their curvature, all over the rationals.
"""

__version__ = "0.1.0"
