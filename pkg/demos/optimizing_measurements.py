"""
Searching for the best measurement
==================================

Simulated annealing over qubit POVMs, minimizing the largest squared
shadow norm over a set of target observables. The budgets here are kept
small so the script runs in about a minute.
"""

import numpy as np

import povm_shadows as ps

cfg = ps.AnnealConfig(outcomes=4, iterations=10000, restarts=2, seed=7)

# Targets: the four tetrahedron projectors. The optimum is the tetrahedron
# reflected through the origin, with norm 1 on every target.
targets = ps.vertex_projections("tetrahedron")
res = ps.anneal_single_qubit(targets, cfg)
print("best objective", round(res.best_objective, 4))
print("distance to inverted tetrahedron", round(ps.vertex_distance(res.best_povm, -ps.solid_vertices("tetrahedron")), 4))

# Targets: 50 Haar-random projectors. Six outcomes approach the octahedron,
# whose value is 3/2.
haar = ps.haar_random_projections(ps.make_rng(3), 2, 50)
res = ps.anneal_single_qubit(haar, ps.AnnealConfig(outcomes=6, iterations=10000, restarts=2, seed=7))
print("Haar targets, best objective", round(res.best_objective, 4))
print("octahedron on the same targets", round(ps.objective(ps.platonic("octahedron"), haar), 4))

# Every factor of a product observable sees the same single-qubit POVM, so
# the search over a 20-qubit problem is as cheap as over one qubit.
rng = ps.make_rng(4)
factors = [[targets[k] for k in rng.integers(0, 4, 20)] for _ in range(20)]
res = ps.anneal_factorized(20, factors, cfg)
print("20 qubits, best objective", round(res.best_objective, 4))
