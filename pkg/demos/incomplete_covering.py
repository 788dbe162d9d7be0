"""A covering whose completion is strictly larger than the algebra.

``Q + W`` with ``W^2 = 0`` and ``dim W = 2``, covered by three lines in
``W``: pairwise compatible local data does not come from a global element.
"""

from qbundles.algebra import covering_completion_algebra
from qbundles.fixtures import incomplete_covering
from qbundles.modules import ModuleCovering, is_complete_module_covering, regular_module

cov = incomplete_covering()
comp = covering_completion_algebra(cov.algebra, cov)
print("algebra dim", cov.algebra.dim, "completion dim", comp.algebra.dim)
print("canonical map injective:", comp.canonical.is_injective(), "surjective:", comp.canonical.is_surjective())

m = regular_module(cov.algebra)
print("regular module covering complete:", is_complete_module_covering(m, ModuleCovering(m, [j.space for j in cov.ideals])))
