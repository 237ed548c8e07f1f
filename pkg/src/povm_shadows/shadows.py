"""Frame operator, its inverse, and the least-square classical shadows.

For a measurement ``E`` the frame superoperator ``C(X) = sum_k tr(X E_k) E_k``
is represented as a real symmetric ``D**2 x D**2`` matrix on an orthonormal
Hermitian basis. The classical shadow of outcome ``k`` is ``C^{-1}(E_k)``,
which is the least-square estimate from a single observation of ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .errors import (
    DimensionError,
    NotInformationallyCompleteError,
    NotRigidlySymmetricError,
    NotUniformError,
    SingularHError,
)
from .povm import Povm, SymmetryCoefficients, symmetry_coefficients

IC_RTOL = 1e-10
AGREEMENT_TOL = 1e-9


@dataclass(frozen=True)
class FrameSuperoperator:
    dim: int
    matrix: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def is_invertible(self) -> bool:
        return bool(self.eigenvalues[0] > IC_RTOL * self.eigenvalues[-1])

    def apply(self, x) -> np.ndarray:
        """``C(X)`` for one operator or a stack of operators."""
        v = ops.vectorize(x, self.basis)
        return ops.unvectorize(v @ self.matrix, self.basis)

    def apply_inverse(self, x) -> np.ndarray:
        if not self.is_invertible:
            raise NotInformationallyCompleteError(
                "frame operator is singular; the POVM is not informationally complete"
            )
        w, u = self.eigenvalues, self.eigenvectors
        inv = (u / w) @ u.T
        v = ops.vectorize(x, self.basis)
        return ops.unvectorize(v @ inv, self.basis)


def frame_operator(povm: Povm) -> FrameSuperoperator:
    cached = povm._cache.get("frame")
    if cached is not None:
        return cached
    basis = ops.operator_basis(povm.dim)
    v = ops.vectorize(povm.effects, basis)
    m = v.T @ v
    m = (m + m.T) / 2
    w, u = np.linalg.eigh(m)
    frame = FrameSuperoperator(povm.dim, m, basis, w, u)
    povm._cache["frame"] = frame
    return frame


@dataclass(frozen=True)
class ClassicalShadowSet:
    """Per-outcome shadows ``rho_k``, shape ``(N, D, D)``.

    ``coefficients`` is set when the shadows came from the symmetric
    closed form ``a E_k + b 1``.
    """

    povm: Povm
    shadows: np.ndarray
    coefficients: SymmetryCoefficients | None = None

    def __len__(self):
        return len(self.shadows)

    def __getitem__(self, k):
        return self.shadows[k]

    def expectations(self, x) -> np.ndarray:
        """Single-shot estimates ``tr(rho_k X)`` for every outcome."""
        return np.einsum("kij,ji->k", self.shadows, np.asarray(x)).real

    def reconstruct(self, probabilities) -> np.ndarray:
        """``sum_k p_k rho_k``; equals ``rho`` when ``p = tr(rho E_k)`` exactly."""
        return np.einsum("k,kij->ij", np.asarray(probabilities, dtype=float), self.shadows)


def _require_ic(frame: FrameSuperoperator):
    if not frame.is_invertible:
        raise NotInformationallyCompleteError(
            "frame operator eigenvalue ratio "
            f"{frame.eigenvalues[0] / frame.eigenvalues[-1]:.3g} is below {IC_RTOL}"
        )


def classical_shadows(povm: Povm) -> ClassicalShadowSet:
    """Shadows ``C^{-1}(E_k)`` by direct inversion of the frame operator (cached)."""
    cached = povm._cache.get("shadows")
    if cached is not None:
        return cached
    frame = frame_operator(povm)
    _require_ic(frame)
    shadows = frame.apply_inverse(povm.effects)
    shadows = (shadows + np.swapaxes(shadows, 1, 2).conj()) / 2
    shadows.setflags(write=False)
    result = ClassicalShadowSet(povm, shadows)
    povm._cache["shadows"] = result
    return result


def classical_shadows_symmetric(povm: Povm) -> ClassicalShadowSet:
    """Shadows from the closed form ``a E_k + b 1`` for rigidly symmetric measurements.

    The closed form is verified by applying the frame operator forward and
    comparing to ``E_k``; a residual that would move any shadow by more than
    ``1e-9`` raises :class:`NotRigidlySymmetricError`.
    """
    coeffs = symmetry_coefficients(povm)
    shadows = coeffs.a * povm.effects + coeffs.b * np.eye(povm.dim)
    frame = frame_operator(povm)
    _require_ic(frame)
    residual = np.max(np.abs(frame.apply(shadows) - povm.effects))
    # residual / lambda_min bounds the error of each closed-form shadow
    if residual > AGREEMENT_TOL * frame.eigenvalues[0]:
        raise NotRigidlySymmetricError(
            f"closed form a E_k + b 1 does not invert the frame (residual {residual:.3g})"
        )
    shadows.setflags(write=False)
    return ClassicalShadowSet(povm, shadows, coeffs)


def least_squares_estimate(povm: Povm, distribution) -> np.ndarray:
    """Least-square state estimate ``(Phi^dagger Phi)^{-1} Phi^dagger p``.

    Linear in ``p``; for exact statistics ``p_k = tr(rho E_k)`` it returns
    ``rho``, and for a one-hot ``p`` it returns the corresponding shadow.
    """
    p = np.asarray(distribution, dtype=float)
    if p.shape != (povm.n_outcomes,):
        raise DimensionError(f"distribution must have length {povm.n_outcomes}")
    if not np.all(np.isfinite(p)):
        raise ValueError("distribution has non-finite entries")
    frame = frame_operator(povm)
    _require_ic(frame)
    est = frame.apply_inverse(np.einsum("k,kij->ij", p, povm.effects))
    return (est + est.conj().T) / 2


@dataclass(frozen=True)
class BlochLeastSquares:
    """Qubit estimator in Bloch form: ``H = (1/N) sum_k r_k r_k^T`` and
    shadow columns ``(1, H^{-1} r_k)``, one per row."""

    h: np.ndarray
    shadow_columns: np.ndarray

    @property
    def directions(self) -> np.ndarray:
        return self.shadow_columns[:, 1:] @ self.h

    def shadows(self) -> np.ndarray:
        return ops.from_bloch(self.shadow_columns)


def bloch_least_squares(povm: Povm) -> BlochLeastSquares:
    """Closed-form qubit estimator for POVMs with effects ``(2/N)(1 + r_k . sigma)/2``."""
    if povm.dim != 2:
        raise DimensionError("Bloch estimator is defined for qubits only")
    n = povm.n_outcomes
    x = povm.bloch()
    if np.max(np.abs(x[:, 0] - 2 / n)) > 1e-9:
        raise NotUniformError("Bloch estimator requires uniform effect traces 2/N")
    r = x[:, 1:] * (n / 2)
    h = r.T @ r / n
    w, u = np.linalg.eigh(h)
    if w[-1] <= 0 or w[0] <= IC_RTOL * w[-1]:
        raise SingularHError("H is singular; the POVM is not informationally complete")
    cols = np.hstack([np.ones((n, 1)), r @ ((u / w) @ u.T)])
    return BlochLeastSquares(h, cols)


def shadows_by_method(povm: Povm, method: str = "general") -> ClassicalShadowSet:
    if method == "general":
        return classical_shadows(povm)
    if method == "symmetric":
        return classical_shadows_symmetric(povm)
    if method == "bloch":
        return ClassicalShadowSet(povm, bloch_least_squares(povm).shadows())
    raise ValueError(f"unknown shadow method {method!r}")
