"""
Depolarizing noise and the cost of estimation
=============================================

Mixing each effect with white noise keeps the measurement informationally
complete, but the shadows stretch and the variance grows.
"""

import numpy as np

import povm_shadows as ps

octa = ps.platonic("octahedron")
direction = [0.0, 0.0, 1.0]

# the squared norm of a projector is the same in every direction and
# follows 3/4 (1 + 1/p^2)
print(" p     norm    3/4(1+1/p^2)")
for p in (1.0, 0.9, 0.5, 0.25, 0.1):
    noisy = ps.depolarize(octa, p)
    norm = ps.projection_norms(noisy, [direction])[0]
    print(f"{p:4.2f}  {norm:8.3f}  {0.75 * (1 + 1 / p**2):8.3f}")

# The coefficients of the closed form change with p.
c = ps.symmetry_coefficients(ps.depolarize(octa, 0.5))
print("p = 0.5: a =", round(c.a, 6), " b =", round(c.b, 6))

# Close to p = 0 the closed form becomes numerically degenerate; the
# general path still works as long as the frame is invertible.
try:
    ps.symmetry_coefficients(ps.depolarize(ps.platonic("icosidodecahedron"), 0.01))
except ps.errors.DegenerateError as exc:
    print("degenerate:", exc)
