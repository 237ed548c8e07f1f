"""Generalised measurements (POVMs): construction, validation and transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import operators as ops
from .errors import (
    ApproximationError,
    DegenerateError,
    DimensionError,
    NonUnitaryError,
    NormalizationError,
    NotUniformError,
    PositivityError,
    RangeError,
    SizeLimitError,
    UnknownSolidError,
)

POSITIVITY_TOL = 1e-10
NORMALIZATION_TOL = 1e-9
UNIFORMITY_TOL = 1e-9
IC_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Povm:
    """A validated measurement ``E = {E_k}`` with ``sum_k E_k = 1``.

    ``effects`` has shape ``(N, D, D)``. Instances are immutable; derived
    quantities such as the classical shadows are cached on first use.
    """

    effects: np.ndarray
    labels: tuple[str, ...] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        effects = np.asarray(self.effects, dtype=complex)
        if effects.ndim == 2:
            raise DimensionError("expected a list of effects, got a single matrix")
        if effects.ndim != 3 or len(effects) == 0:
            raise DimensionError("a POVM needs at least one square effect")
        effects = np.array([ops.hermitian(e) for e in effects])
        d = effects.shape[-1]
        mins = np.linalg.eigvalsh(effects)[:, 0]
        bad = np.flatnonzero(mins < -POSITIVITY_TOL)
        if bad.size:
            raise PositivityError(
                f"effect {bad[0]} has negative eigenvalue {mins[bad[0]]:.3g}"
            )
        dev = np.max(np.abs(effects.sum(axis=0) - np.eye(d)))
        if dev > NORMALIZATION_TOL:
            raise NormalizationError(f"effects sum to identity only within {dev:.3g}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(effects):
                raise DimensionError("number of labels does not match number of effects")
            object.__setattr__(self, "labels", labels)
        effects.setflags(write=False)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects.shape[-1]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def __len__(self):
        return len(self.effects)

    @property
    def traces(self) -> np.ndarray:
        return np.trace(self.effects, axis1=1, axis2=2).real

    @property
    def is_uniform_trace(self) -> bool:
        t = self.traces
        return bool(np.ptp(t) <= UNIFORMITY_TOL)

    def probabilities(self, rho) -> np.ndarray:
        """Born-rule probabilities ``tr(rho E_k)``."""
        return np.einsum("kij,ji->k", self.effects, np.asarray(rho)).real

    def bloch(self) -> np.ndarray:
        """Effect Bloch vectors ``(tr E_k, tr(E_k sigma))``, shape ``(N, 4)``."""
        return ops.to_bloch(self.effects)

    def __repr__(self):
        return f"Povm(dim={self.dim}, n_outcomes={self.n_outcomes})"


def validate(effects, labels=None) -> Povm:
    """Check positivity and normalization of ``effects`` and wrap them."""
    return Povm(effects, labels)


def is_informationally_complete(povm: Povm) -> bool:
    """True iff the effects span the full ``D**2``-dimensional operator space."""
    v = ops.vectorize(povm.effects)
    if v.shape[0] < v.shape[1]:
        return False
    s = np.linalg.svd(v, compute_uv=False)
    return bool(s[-1] > IC_RTOL * s[0])


@dataclass(frozen=True)
class QubitPovmParams:
    """Qubit POVM with effects ``(w_k/2)(1 + v_k . sigma)``."""

    weights: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.directions, dtype=float).reshape(len(w), 3)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "directions", v)

    def residual(self) -> float:
        """Violation of the constraints ``w >= 0, sum w = 2, sum w v = 0, |v| <= 1``."""
        return float(
            max(
                -self.weights.min(initial=0.0),
                abs(self.weights.sum() - 2),
                np.linalg.norm(self.weights @ self.directions),
                np.linalg.norm(self.directions, axis=1).max(initial=0.0) - 1,
            )
        )

    def effect_bloch(self) -> np.ndarray:
        return self.weights[:, None] * np.hstack([np.ones((len(self.weights), 1)), self.directions])

    def to_povm(self, labels=None) -> Povm:
        return Povm(ops.from_bloch(self.effect_bloch()), labels)

    @classmethod
    def from_povm(cls, povm: Povm) -> "QubitPovmParams":
        _require_qubit(povm)
        x = povm.bloch()
        w = x[:, 0]
        with np.errstate(invalid="ignore", divide="ignore"):
            v = np.where(w[:, None] > 0, x[:, 1:] / w[:, None], 0.0)
        return cls(w, v)


def from_bloch_params(weights, directions, labels=None) -> Povm:
    return QubitPovmParams(weights, directions).to_povm(labels)


def _require_qubit(povm: Povm):
    if povm.dim != 2:
        raise DimensionError("operation is defined for qubit POVMs only")


def _unit_vertex_povm(vertices, labels=None) -> Povm:
    v = np.asarray(vertices, dtype=float)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    n = len(v)
    return from_bloch_params(np.full(n, 2 / n), v, labels)


PHI = (1 + math.sqrt(5)) / 2


def _cyclic(points):
    out = []
    for p in points:
        for s in range(3):
            out.append(tuple(np.roll(p, s)))
    return out


def _signs(p):
    """All sign flips of the nonzero coordinates of ``p``."""
    out = [()]
    for c in p:
        out = [q + (c,) for q in out] + ([q + (-c,) for q in out] if c != 0 else [])
    return out


def _solid_vertices(name: str) -> tuple[np.ndarray, list[str]]:
    if name == "octahedron":
        verts = [(0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
        return np.array(verts, float), ["z+", "z-", "x+", "x-", "y+", "y-"]
    if name == "tetrahedron":
        verts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif name == "cube":
        verts = _signs((1, 1, 1))
    elif name == "cuboctahedron":
        verts = [q for p in _cyclic([(1, 1, 0)]) for q in _signs(p)]
    elif name == "icosahedron":
        verts = [q for p in _cyclic([(0, 1, PHI)]) for q in _signs(p)]
    elif name == "dodecahedron":
        verts = _signs((1, 1, 1)) + [q for p in _cyclic([(0, 1 / PHI, PHI)]) for q in _signs(p)]
    elif name == "icosidodecahedron":
        verts = [q for p in _cyclic([(0, 0, PHI)]) for q in _signs(p)]
        verts += [q for p in _cyclic([(0.5, PHI / 2, PHI**2 / 2)]) for q in _signs(p)]
    else:
        raise UnknownSolidError(f"unknown solid {name!r}; choose from {', '.join(SOLIDS)}")
    v = np.array(verts, dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True), [f"v{i}" for i in range(len(v))]


SOLIDS = (
    "octahedron",
    "tetrahedron",
    "cube",
    "cuboctahedron",
    "icosahedron",
    "dodecahedron",
    "icosidodecahedron",
)


def solid_vertices(name: str) -> np.ndarray:
    """Unit vertices of one of the symmetric solids in :data:`SOLIDS`."""
    return _solid_vertices(name)[0]


def platonic(name: str) -> Povm:
    """Uniform qubit POVM ``(2/N)(1 + r_k . sigma)/2`` over the vertices of a solid.

    ``"sic"`` is accepted as an alias for the tetrahedron.
    """
    name = {"sic": "tetrahedron"}.get(name, name)
    verts, labels = _solid_vertices(name)
    return _unit_vertex_povm(verts, labels)


def vertex_projections(name: str) -> np.ndarray:
    """Pure-state projectors onto the vertex directions of a solid, shape ``(N, 2, 2)``.

    ``vertex_projections("octahedron")`` are the six Pauli eigenprojections.
    """
    name = {"sic": "tetrahedron"}.get(name, name)
    return ops.bloch_projector(solid_vertices(name))


def inverted(povm: Povm) -> Povm:
    """Reflect every effect through the centre of the Bloch sphere.

    For a qubit effect ``E`` this is ``tr(E) 1 - E``: weights stay, ``r -> -r``.
    """
    _require_qubit(povm)
    t = povm.traces
    flipped = t[:, None, None] * np.eye(2) - povm.effects
    labels = None if povm.labels is None else tuple(f"-{s}" for s in povm.labels)
    return Povm(flipped, labels)


def _merge_duplicates(effects: np.ndarray, tol: float) -> np.ndarray:
    merged: list[np.ndarray] = []
    reps: list[np.ndarray] = []
    for e in effects:
        for i, r in enumerate(reps):
            if np.max(np.abs(e - r)) <= tol:
                merged[i] = merged[i] + e
                break
        else:
            reps.append(e)
            merged.append(e.copy())
    return np.array(merged)


def from_unitary_ensemble(unitaries, merge_duplicates: bool = True, tol: float = 1e-9) -> Povm:
    """POVM simulated by applying a uniformly random ``U`` then measuring the computational basis.

    Effects are ``U^dagger |b><b| U / |ensemble|``. With ``merge_duplicates``,
    effects that agree within ``tol`` (max-norm) are summed; the comparison
    is between the unweighted projectors.
    """
    us = np.asarray(unitaries, dtype=complex)
    if us.ndim == 2:
        us = us[None]
    if us.ndim != 3 or us.shape[1] != us.shape[2] or len(us) == 0:
        raise DimensionError("expected a nonempty list of square matrices")
    d = us.shape[-1]
    for u in us:
        if np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-10:
            raise NonUnitaryError("ensemble contains a non-unitary matrix")
    # row b of U is <b|U, so U^dagger|b><b|U = outer(conj(row), row)
    effects = np.einsum("ubi,ubj->ubij", us.conj(), us).reshape(-1, d, d)
    if merge_duplicates:
        effects = _merge_duplicates(effects, tol)
    return Povm(effects / len(us))


def single_qubit_clifford_group() -> np.ndarray:
    """The 24 single-qubit Clifford unitaries (modulo global phase)."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)

    def canon(u):
        # fix the global phase so the first sizeable entry is real positive
        idx = np.flatnonzero(np.abs(u.ravel()) > 1e-6)[0]
        z = u.ravel()[idx]
        return u * (abs(z) / z)

    group = [np.eye(2, dtype=complex)]
    frontier = list(group)
    while frontier:
        nxt = []
        for g in frontier:
            for gen in (h, s):
                c = canon(gen @ g)
                if not any(np.allclose(c, q, atol=1e-9) for q in group):
                    group.append(c)
                    nxt.append(c)
        frontier = nxt
    return np.array(group)


def depolarize(povm: Povm, p: float) -> Povm:
    """Mix every effect with white noise: ``E_k -> (1-p) tr(E_k) 1/D + p E_k``.

    ``p = 1`` is the noiseless measurement, ``p = 0`` carries no information.
    """
    if not 0 <= p <= 1:
        raise RangeError(f"depolarization parameter must lie in [0, 1], got {p}")
    d = povm.dim
    noise = povm.traces[:, None, None] * np.eye(d) / d
    return Povm((1 - p) * noise + p * povm.effects, povm.labels)


def uniform_trace_split(povm: Povm, denominator_cap: int = 1000) -> Povm:
    """Split effects into identical copies so that all traces become equal.

    Each trace ``alpha_k`` is approximated by its best rational approximant
    with denominator at most ``denominator_cap``. With ``eps`` the largest
    number such that every ``alpha_k / eps = N_k`` is an integer, effect
    ``E_k`` is replaced by ``N_k`` copies of ``E_k / N_k``.
    """
    traces = povm.traces
    fracs = []
    for t in traces:
        f = Fraction(float(t)).limit_denominator(denominator_cap)
        if abs(float(f) - t) > NORMALIZATION_TOL or f <= 0:
            raise ApproximationError(
                f"trace {t!r} has no rational approximation with denominator <= {denominator_cap}"
            )
        fracs.append(f)
    common = math.lcm(*(f.denominator for f in fracs))
    if common > denominator_cap:
        raise ApproximationError(
            f"common denominator {common} exceeds cap {denominator_cap}"
        )
    nums = [f.numerator * (common // f.denominator) for f in fracs]
    g = math.gcd(*nums)
    counts = [n // g for n in nums]
    effects, labels = [], []
    for k, (e, c) in enumerate(zip(povm.effects, counts)):
        base = povm.labels[k] if povm.labels else str(k)
        for j in range(c):
            effects.append(e / c)
            labels.append(base if c == 1 else f"{base}.{j}")
    return Povm(np.array(effects), tuple(labels))


@dataclass(frozen=True)
class SymmetryCoefficients:
    """Traces ``alpha = tr E_k``, ``beta = tr E_k^2``, ``gamma = sum_l tr(E_k E_l)^2``
    and the closed-form shadow coefficients in ``rho_k = a E_k + b 1``."""

    alpha: float
    beta: float
    gamma: float
    a: float
    b: float


def symmetry_coefficients(povm: Povm) -> SymmetryCoefficients:
    """Solve ``alpha = a alpha^2 + b alpha D`` and ``beta = a gamma + b alpha^2``.

    Only uniformity is checked. Whether ``a E_k + b 1`` actually inverts the
    frame operator depends on rigid symmetry, which is verified by
    :func:`povm_shadows.shadows.classical_shadows_symmetric`.
    """
    e = povm.effects
    d = povm.dim
    gram = np.einsum("kij,lji->kl", e, e).real
    alpha = povm.traces
    beta = np.diag(gram)
    gamma = (gram**2).sum(axis=1)
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if np.ptp(v) > UNIFORMITY_TOL:
            raise NotUniformError(f"{name} = tr-statistic varies across effects by {np.ptp(v):.3g}")
    al, be, ga = float(alpha.mean()), float(beta.mean()), float(gamma.mean())
    den = d * ga - al**3
    if abs(den) < 1e-12:
        raise DegenerateError("D*gamma - alpha^3 vanishes; closed form undefined")
    return SymmetryCoefficients(al, be, ga, (d * be - al**2) / den, (ga - al * be) / den)


def tensor_povm(povms: Sequence[Povm], max_dim: int = ops.MAX_DIM) -> Povm:
    """Explicit joint POVM ``E_{k1} x E_{k2} x ...``; outcomes in row-major order."""
    effects = povms[0].effects
    for p in povms[1:]:
        d = effects.shape[-1] * p.dim
        if d > max_dim:
            raise SizeLimitError(f"tensor dimension {d} exceeds cap {max_dim}")
        effects = np.einsum("aij,bkl->abikjl", effects, p.effects).reshape(-1, d, d)
    return Povm(effects)


def random_povm(rng: np.random.Generator, d: int, n_outcomes: int) -> Povm:
    """Random rank-one POVM via square-root normalization of random projectors."""
    a = ops.haar_random_projections(rng, d, n_outcomes) * rng.uniform(0.2, 1.0, n_outcomes)[:, None, None]
    s = a.sum(axis=0)
    w, u = np.linalg.eigh(s)
    s_inv_half = u @ np.diag(w**-0.5) @ u.conj().T
    return Povm(s_inv_half @ a @ s_inv_half)


def random_uniform_qubit_povm(rng: np.random.Generator, n_outcomes: int) -> Povm:
    """Random uniform-trace qubit POVM with centred, rescaled directions."""
    v = rng.standard_normal((n_outcomes, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v -= v.mean(axis=0)
    v /= np.linalg.norm(v, axis=1).max()
    return from_bloch_params(np.full(n_outcomes, 2 / n_outcomes), v)


def povm_to_json(povm: Povm, bloch: bool = False) -> dict:
    if bloch:
        params = QubitPovmParams.from_povm(povm)
        items = [
            {"w": float(w), "v": [float(c) for c in v]}
            for w, v in zip(params.weights, params.directions)
        ]
        out = {"dim": 2, "bloch": items}
    else:
        out = {"dim": povm.dim, "effects": [ops.operator_to_json(e) for e in povm.effects]}
    if povm.labels is not None:
        out["labels"] = list(povm.labels)
    return out


def povm_from_json(obj: dict) -> Povm:
    labels = obj.get("labels")
    if "bloch" in obj:
        if int(obj.get("dim", 2)) != 2:
            raise DimensionError("Bloch shorthand is only valid for dim 2")
        w = [item["w"] for item in obj["bloch"]]
        v = [item["v"] for item in obj["bloch"]]
        return from_bloch_params(w, v, labels)
    effects = [ops.operator_from_json(e) for e in obj["effects"]]
    dims = {e.shape[0] for e in effects}
    if len(dims) != 1:
        raise DimensionError("effects have different dimensions")
    if "dim" in obj and int(obj["dim"]) not in dims:
        raise DimensionError("declared dim does not match effects")
    return Povm(np.array(effects), labels)


def named_povm(name: str) -> Povm:
    """Resolve built-in names: the solids, ``sic`` and ``inverted-<solid>``."""
    if name.startswith("inverted-"):
        return inverted(platonic(name[len("inverted-"):]))
    return platonic(name)
