"""Vectorized qubit kernels in the Bloch representation.

A qubit operator ``X = 1/2 sum_i x_i sigma_i`` is a real 4-vector and
``tr(XY) = x.y / 2``. With effect vectors ``e_k`` the frame operator acts as
``x -> F x / 2`` with ``F = sum_k e_k e_k^T``, so the shadows are
``s_k = 2 F^{-1} e_k``. These closed forms let the optimizer and the sphere
grid evaluate thousands of shadow norms without forming any matrices.
"""

import numpy as np

IC_RTOL = 1e-10


def shadow_bloch(effect_bloch: np.ndarray) -> np.ndarray | None:
    """Shadow Bloch vectors, shape ``(N, 4)``; ``None`` if not informationally complete."""
    f = effect_bloch.T @ effect_bloch
    w, u = np.linalg.eigh(f)
    if w[0] <= IC_RTOL * w[-1]:
        return None
    f_inv = (u / w) @ u.T
    return 2 * effect_bloch @ f_inv


def projection_norms(effect_bloch: np.ndarray, shadows: np.ndarray, obs_bloch: np.ndarray) -> np.ndarray:
    """Squared shadow norms ``lambda_max(sum_k tr(rho_k X)^2 E_k)`` for each observable row.

    ``obs_bloch`` has shape ``(M, 4)``; the result has shape ``(M,)``.
    """
    t = 0.5 * shadows @ obs_bloch.T
    c = effect_bloch.T @ (t * t)
    return 0.5 * (c[0] + np.sqrt(c[1] ** 2 + c[2] ** 2 + c[3] ** 2))
