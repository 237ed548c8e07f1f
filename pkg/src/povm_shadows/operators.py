"""Dense Hermitian operator algebra for small Hilbert spaces.

Operators are plain ``numpy`` complex arrays of shape ``(D, D)``. The
helpers here validate them, convert qubit operators to and from the Bloch
representation ``X = 1/2 sum_i x_i sigma_i`` with ``sigma = (1, X, Y, Z)``,
build orthonormal operator bases and draw Haar-random pure states.

Random numbers come from ``numpy``'s Philox4x64 generator, a counter-based
64-bit PRNG (Salmon et al., SC'11). A stream is fully determined by its
integer seed, so results are reproducible across platforms.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import (
    DimensionError,
    HermiticityError,
    InvalidStateError,
    SizeLimitError,
)

HERMITICITY_TOL = 1e-9
MAX_DIM = 2**12

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z = PAULIS


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Return a Philox-backed generator for ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def hermitian(a, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate ``a`` as a Hermitian matrix and return its symmetrized copy.

    Floating point noise up to ``tol`` (max-norm of ``(A - A^dagger)/2``) is
    absorbed; anything larger raises :class:`HermiticityError`.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise DimensionError("operator dimension must be at least 2")
    sym = (a + a.conj().T) / 2
    if np.max(np.abs(a - sym), initial=0.0) > tol:
        raise HermiticityError("matrix is not Hermitian")
    return sym


def dim_of(a: np.ndarray) -> int:
    return a.shape[-1]


def to_bloch(a) -> np.ndarray:
    """Bloch coordinates ``x_i = tr(A sigma_i)`` of a qubit operator.

    The identity maps to ``(2, 0, 0, 0)`` and a pure state to ``(1, r)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-2:] != (2, 2):
        raise DimensionError("Bloch representation requires a qubit operator")
    return np.einsum("...ij,kji->...k", a, PAULIS).real


def from_bloch(x) -> np.ndarray:
    """Inverse of :func:`to_bloch`; accepts a trailing axis of length 4."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise DimensionError("Bloch vectors have four components")
    return 0.5 * np.einsum("...k,kij->...ij", x, PAULIS)


def bloch_projector(n) -> np.ndarray:
    """Pure-state projector ``(1 + n.sigma)/2`` for a unit 3-vector ``n``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    ones = np.ones(n.shape[:-1] + (1,))
    return from_bloch(np.concatenate([ones, n], axis=-1))


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def max_eigenvalue(a) -> float:
    return float(np.linalg.eigvalsh(a)[-1])


def tensor(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with a guard on the resulting dimension."""
    a, b = np.asarray(a), np.asarray(b)
    d = a.shape[-1] * b.shape[-1]
    if d > max_dim:
        raise SizeLimitError(f"tensor dimension {d} exceeds cap {max_dim}")
    return np.kron(a, b)


def tensor_all(ops, max_dim: int = MAX_DIM) -> np.ndarray:
    return functools.reduce(lambda x, y: tensor(x, y, max_dim), ops)


def haar_random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-random unit vector: independent standard complex Gaussians, normalized."""
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def haar_random_projection(seed: int, d: int) -> np.ndarray:
    """Rank-one projector onto a Haar-random pure state; deterministic in ``seed``."""
    if d < 2:
        raise DimensionError("dimension must be at least 2")
    return projector(haar_random_state(make_rng(seed), d))


def haar_random_projections(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    return np.array([projector(haar_random_state(rng, d)) for _ in range(count)])


def random_density_matrix(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the induced (Hilbert-Schmidt for full rank) measure."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def check_density_matrix(rho, tol: float = 1e-9) -> np.ndarray:
    """Validate a density operator (Hermitian, PSD, unit trace)."""
    try:
        rho = hermitian(rho)
    except (HermiticityError, DimensionError) as exc:
        raise InvalidStateError(str(exc)) from exc
    if abs(np.trace(rho).real - 1) > tol:
        raise InvalidStateError("state does not have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -1e-10:
        raise InvalidStateError("state is not positive semidefinite")
    return rho


@functools.lru_cache(maxsize=None)
def _basis(d: int) -> np.ndarray:
    n = int(round(np.log2(d)))
    if 2**n == d:
        # normalized Pauli strings
        elems = [
            functools.reduce(np.kron, word) / np.sqrt(d)
            for word in itertools.product(PAULIS, repeat=n)
        ]
        return np.array(elems)
    # generalized Gell-Mann matrices, scaled so that tr(B_i B_j) = delta_ij
    elems = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            elems.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2)
            a[k, j] = 1j / np.sqrt(2)
            elems.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        elems.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return np.array(elems)


def operator_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of shape ``(d**2, d, d)`` under ``tr(AB)``.

    Normalized Pauli strings when ``d`` is a power of two, generalized
    Gell-Mann matrices otherwise. The first element is ``1/sqrt(d)``.
    """
    if d < 2:
        raise DimensionError("dimension must be at least 2")
    b = _basis(d)
    b.setflags(write=False)
    return b


def vectorize(a, basis: np.ndarray | None = None) -> np.ndarray:
    """Real coordinates ``tr(A B_i)`` of (a stack of) Hermitian operators."""
    a = np.asarray(a, dtype=complex)
    basis = operator_basis(a.shape[-1]) if basis is None else basis
    return np.einsum("...ij,kji->...k", a, basis).real


def unvectorize(x, basis: np.ndarray) -> np.ndarray:
    return np.einsum("...k,kij->...ij", np.asarray(x, dtype=float), basis)


def operator_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"dim": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def operator_from_json(obj: dict) -> np.ndarray:
    """Parse either the matrix form ``{dim, re, im}`` or qubit ``{x0, r}``."""
    if "x0" in obj:
        r = obj["r"]
        if len(r) != 3:
            raise DimensionError("Bloch vector 'r' must have three components")
        return hermitian(from_bloch([obj["x0"], *r]))
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise DimensionError("'re' and 'im' shapes differ")
    a = hermitian(re + 1j * im)
    if "dim" in obj and int(obj["dim"]) != a.shape[0]:
        raise DimensionError(f"declared dim {obj['dim']} does not match matrix size {a.shape[0]}")
    return a


def bloch_to_json(a) -> dict:
    x = to_bloch(a)
    return {"x0": float(x[0]), "r": [float(v) for v in x[1:]]}
