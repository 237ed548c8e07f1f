"""Shadow norms and estimator variances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _qubit
from . import operators as ops
from .errors import DimensionError, NormalizationError
from .povm import Povm
from .shadows import bloch_least_squares, classical_shadows

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class NormReport:
    squared_norm: float
    worst_state: np.ndarray
    per_outcome_weights: np.ndarray

    @property
    def worst_state_bloch(self) -> np.ndarray | None:
        if self.worst_state.shape != (2, 2):
            return None
        return ops.to_bloch(self.worst_state)[1:]


def _check_dims(povm: Povm, x: np.ndarray):
    if x.shape != (povm.dim, povm.dim):
        raise DimensionError(f"observable shape {x.shape} does not match POVM dim {povm.dim}")


def _worst_state(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    scale = max(1.0, abs(w[-1]))
    top = np.flatnonzero(w >= w[-1] - DEGENERACY_TOL * scale)
    if len(top) == 1:
        return ops.projector(u[:, top[0]])
    if len(u) == 2:
        # whole space is degenerate: the pure state with the
        # lexicographically largest Bloch vector is |x+>
        return ops.bloch_projector([1.0, 0.0, 0.0])
    v = u[:, top]
    return v @ v.conj().T / len(top)


def norm_operator(povm: Povm, x) -> np.ndarray:
    """``sum_k tr(rho_k X)^2 E_k``, whose top eigenvalue is the squared shadow norm."""
    x = np.asarray(x, dtype=complex)
    _check_dims(povm, x)
    t = classical_shadows(povm).expectations(x)
    return np.einsum("k,kij->ij", t**2, povm.effects)


def squared_shadow_norm(povm: Povm, x) -> NormReport:
    """Worst-case single-shot variance bound ``lambda_max(sum_k tr(rho_k X)^2 E_k)``."""
    x = np.asarray(x, dtype=complex)
    _check_dims(povm, x)
    t = classical_shadows(povm).expectations(x)
    op = np.einsum("k,kij->ij", t**2, povm.effects)
    w, u = np.linalg.eigh(op)
    return NormReport(float(w[-1]), _worst_state(w, u), t**2)


def estimator_variance(povm: Povm, x, rho) -> float:
    """Variance of the single-shot estimate of ``tr(rho X)`` under state ``rho``."""
    rho = ops.check_density_matrix(rho)
    x = np.asarray(x, dtype=complex)
    _check_dims(povm, x)
    t = classical_shadows(povm).expectations(x)
    mean = np.trace(rho @ x).real
    return float(t**2 @ povm.probabilities(rho) - mean**2)


def average_squared_norm(povm: Povm, x) -> float:
    """Haar-averaged variance proxy ``sum_k tr(rho_k X)^2 tr(E_k)``.

    Only defined up to an additive constant, and only for observables with
    ``tr X = 0`` and ``tr X^2 = 1``.
    """
    x = np.asarray(x, dtype=complex)
    _check_dims(povm, x)
    if abs(np.trace(x)) > 1e-9 or abs(np.trace(x @ x).real - 1) > 1e-9:
        raise NormalizationError("observable must satisfy tr X = 0 and tr X^2 = 1")
    t = classical_shadows(povm).expectations(x)
    return float(t**2 @ povm.traces)


def log_factorized_squared_norm(povms: Sequence[Povm], factors) -> float:
    """Natural log of the squared norm of ``X1 x X2 x ...`` under ``E1 x E2 x ...``.

    Squared norms are nonnegative, so the log is ``-inf`` exactly when a factor vanishes.
    """
    if len(povms) != len(factors):
        raise DimensionError("need one factor per POVM")
    total = 0.0
    for p, x in zip(povms, factors):
        v = squared_shadow_norm(p, x).squared_norm
        if v <= 0:
            return -math.inf
        total += math.log(v)
    return total


def factorized_squared_norm(povms: Sequence[Povm], factors) -> float:
    """Product of per-site squared shadow norms; never builds the joint operator."""
    if len(povms) != len(factors):
        raise DimensionError("need one factor per POVM")
    return float(np.prod([squared_shadow_norm(p, x).squared_norm for p, x in zip(povms, factors)]))


def octahedron_bound(povm: Povm) -> float:
    """Lower bound ``(9 + tr H^{-1}) / 12`` on the worst projection norm.

    Never below 3/2; equal to 3/2 for the octahedron.
    """
    h = bloch_least_squares(povm).h
    return float((9 + np.trace(np.linalg.inv(h))) / 12)


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` quasi-uniform unit vectors on the sphere (Fibonacci lattice)."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (3 - np.sqrt(5)) * i
    rho = np.sqrt(1 - z**2)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def sphere_grid(resolution: int) -> np.ndarray:
    """Union of Fibonacci lattices with ``r**2`` points for ``r = 8..resolution``.

    Grids are nested in ``resolution``, so a maximum over them never decreases.
    """
    return np.vstack([fibonacci_sphere(r * r) for r in range(8, resolution + 1)])


def projection_norms(povm: Povm, directions) -> np.ndarray:
    """Squared shadow norms of the pure-state projectors along ``directions``.

    Directions are normalized before use.
    """
    if povm.dim != 2:
        raise DimensionError("projection norms on the sphere are defined for qubits")
    directions = np.asarray(directions, dtype=float).reshape(-1, 3)
    directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)
    obs = np.hstack([np.ones((len(directions), 1)), directions])
    shadows = ops.to_bloch(classical_shadows(povm).shadows)
    return _qubit.projection_norms(povm.bloch(), shadows, obs)


def max_projection_norm_grid(povm: Povm, resolution: int = 64) -> float:
    """Maximum squared shadow norm over pure-state projectors on a sphere grid."""
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    return float(projection_norms(povm, sphere_grid(resolution)).max())
