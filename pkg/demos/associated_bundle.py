"""Associated bundles of a Z2 principal comodule over four points.

The same transition function yields the Möbius bundle for the sign
representation and a rank-two bundle for the regular one.
"""

from qbundles.associated import (
    build_hor_E,
    connection_from_gauge,
    epsilon_iso,
    local_curvature_form,
    transitions_from_tau,
)
from qbundles.connection import curvature
from qbundles.fixtures import mobius_calculi, mobius_gauges, mobius_principal, rank2_comodule, sign_comodule

principal = mobius_principal()
cal = mobius_calculi(2)

for label, fibre in (("sign", sign_comodule()), ("regular", rank2_comodule())):
    print(f"--- {label} fibre (dim {fibre.dim})")
    print("overlap transition:", transitions_from_tau(principal, fibre).matrix(0, 1).to_strings())
    eps = epsilon_iso(principal, fibre)
    print("cotensor dim", eps.source.dim, "glued dim", eps.target.dim,
          "bijective", eps.is_bijective(), "intertwines", not eps.intertwining_violations())
    hor = build_hor_E(principal, fibre, cal)
    print("horizontal forms by degree:", hor.graded_dims, "bijective:", hor.is_bijective())
    gauges = mobius_gauges(cal)
    nabla = connection_from_gauge(gauges, fibre, cal, principal)
    print("gauge connection violations:", nabla.violations(), "flat:", curvature(nabla).is_zero())

# a lift of t that is not an involution gives curvature on chart 1
curved = local_curvature_form(mobius_gauges(cal, x=0)[1], sign_comodule())
print("curvature form reproduces the square of the connection:", not curved.reproduction_violations())
print("nonzero curvature form:", any(any(v) for v in curved.values))
