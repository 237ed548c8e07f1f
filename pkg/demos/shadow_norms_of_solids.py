"""
Shadow norms of the polyhedral qubit measurements
=================================================

Build the measurements whose Bloch vectors sit on the vertices of the
regular solids, look at their classical shadows and compare how well each
one estimates pure-state projectors.
"""

import numpy as np

import povm_shadows as ps

# Every solid gives a uniform measurement, so its shadows take the form
# a E_k + b 1. The coefficients grow with the number of outcomes.
for name in ps.SOLIDS:
    povm = ps.platonic(name)
    c = ps.symmetry_coefficients(povm)
    print(f"{name:18s} N={povm.n_outcomes:2d}  a={c.a:6.2f}  b={c.b:5.2f}")

# The closed form agrees with inverting the frame superoperator directly.
octa = ps.platonic("octahedron")
gap = np.abs(ps.classical_shadows_symmetric(octa).shadows - ps.classical_shadows(octa).shadows).max()
print("closed form vs frame inversion:", gap)

# Squared shadow norms bound the single-shot variance over all states.
tet = ps.platonic("tetrahedron")
targets = ps.vertex_projections("tetrahedron")
for label, povm in [("tetrahedron", tet), ("inverted tetrahedron", ps.inverted(tet)), ("octahedron", octa)]:
    norms = [ps.squared_shadow_norm(povm, P).squared_norm for P in targets]
    print(f"{label:22s} on tetrahedron projections: {np.round(norms, 6)}")

# Over all pure projectors the octahedron is flat at 3/2, while the
# tetrahedron peaks at 2 along its own vertices.
for name in ("octahedron", "tetrahedron", "cube"):
    povm = ps.platonic(name)
    print(f"{name:12s} grid max {ps.max_projection_norm_grid(povm):.4f}  bound {ps.octahedron_bound(povm):.4f}")
