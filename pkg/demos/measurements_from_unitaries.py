"""
Measurements from random unitaries
==================================

Applying a random unitary and then measuring in the computational basis is
a single POVM. Averaging over the Pauli bases or the Clifford group both
give the octahedron.
"""

import numpy as np

import povm_shadows as ps

h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
hs = h @ np.diag([1, -1j])
bases = np.array([np.eye(2), h, hs])
pauli = ps.from_unitary_ensemble(bases)
print("Pauli bases:", pauli.n_outcomes, "effects, traces", np.round(pauli.traces, 4))

clifford = ps.from_unitary_ensemble(ps.single_qubit_clifford_group())
print("Clifford group:", clifford.n_outcomes, "effects after merging duplicates")
print("same norms as the octahedron:",
      np.isclose(ps.objective(clifford, ps.vertex_projections("octahedron")), 1.5))

# A measurement with unequal traces can be split into equal-trace pieces
# without changing the shadows' statistics.
skewed = ps.from_bloch_params([0.6, 0.6, 0.4, 0.4], [[0, 0, 1], [0, 0, -1], [1, 0, 0], [-1, 0, 0]])
split = ps.uniform_trace_split(skewed)
print("split:", skewed.n_outcomes, "->", split.n_outcomes, "outcomes, uniform:", split.is_uniform_trace)
