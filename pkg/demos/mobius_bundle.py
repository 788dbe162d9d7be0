"""The Möbius line bundle over four points, glued from two charts.

Walks through: covering the function algebra, gluing a twisted line
bundle, checking the bundle axioms, then a flat connection and its
curvature on the forms-valued bundle.
"""

from qbundles.connection import LocalConnection, assemble_global, curvature, localize_global, zero_connection
from qbundles.errors import IncompatibleConnections
from qbundles.fixtures import c4_covering, mobius_calculi, mobius_lift
from qbundles.qvb import TransitionMaps, build_forms_qvb, build_qvb, transitions_from_trivializations, verify_qvb

cov = c4_covering()
print("charts:", [b.dim for b in cov.charts], "overlap:", cov.overlap(0, 1).algebra.dim)

# the twist is +1 at point 0 and -1 at point 2 of the overlap
t = TransitionMaps.from_functions(cov, 1, {(0, 1): [[[1, -1]]]})
bundle = build_qvb(t)
print("sections:", bundle.dim, "axiom violations:", verify_qvb(bundle))
print("round trip recovers the twist:",
      transitions_from_trivializations(bundle.module, bundle.zetas, cov, 1) == t)

cal = mobius_calculi(2)
forms = build_forms_qvb(t, cal)
print("forms-valued sections by degree:", forms.graded_dims)

c0, c1 = cal.charts
lift = mobius_lift(c1)
gauge = tuple(-x for x in c1.mul(lift, c1.diff(lift)))
nabla = assemble_global([zero_connection(0, c0, 1), LocalConnection(1, c1, 1, [[gauge]])], forms)
print("connection violations:", nabla.violations())
print("localize then assemble is the identity:", assemble_global(localize_global(nabla), forms).nabla == nabla.nabla)
print("flat:", curvature(nabla).is_zero())

# the zero connection on both charts does not glue across the twist
try:
    assemble_global([zero_connection(i, c, 1) for i, c in enumerate(cal.charts)], forms)
except IncompatibleConnections as err:
    print("zero connections rejected on overlap", err.pair, "residual rank", err.residual.rank())
