"""Simulated annealing over qubit POVMs for a target set of observables.

The search space is the set of qubit POVMs ``{(w_k/2)(1 + v_k . sigma)}``
with ``w_k >= 0``, ``sum w_k = 2``, ``sum w_k v_k = 0`` and ``|v_k| <= 1``.
The objective is the largest squared shadow norm over the targets; in
factorized mode one POVM is applied to every site and each target's norm is
the product of its per-site norms.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _qubit
from . import operators as ops
from .errors import ConfigError, DimensionError, NotFactorizedError
from .norms import squared_shadow_norm
from .povm import Povm, QubitPovmParams, is_informationally_complete

log = logging.getLogger(__name__)

REPAIR_ROUNDS = 4


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing hyperparameters.

    ``initial_temperature = 0`` selects the 90th percentile of
    ``|delta objective|`` over 100 random moves. The temperature is
    multiplied by ``cooling_ratio`` every ``iterations / cooling_steps``
    iterations, and proposal widths shrink with ``sqrt(T / T0)``.
    """

    outcomes: int = 6
    iterations: int = 20000
    initial_temperature: float = 0.0
    cooling_ratio: float = 0.995
    move_scale: float = 0.6
    restarts: int = 8
    seed: int = 0
    cooling_steps: int = 2000
    min_move_scale: float = 1e-4

    def __post_init__(self):
        if self.outcomes < 4:
            raise ConfigError("qubit informational completeness needs at least 4 outcomes")
        if not 0.9 < self.cooling_ratio < 1:
            raise ConfigError("cooling_ratio must lie in (0.9, 1)")
        if self.restarts < 1 or self.iterations < 1 or self.cooling_steps < 1:
            raise ConfigError("restarts, iterations and cooling_steps must be positive")
        if self.initial_temperature < 0 or self.move_scale <= 0:
            raise ConfigError("temperature must be >= 0 and move_scale > 0")


@dataclass(frozen=True)
class OptimizationResult:
    best_povm: Povm
    best_objective: float
    objective_trace: list[tuple[int, float]]
    restarts_summary: list[float]
    best_params: QubitPovmParams = field(repr=False)


class _Objective:
    """Log of the max over targets of products of per-site squared norms.

    ``targets`` holds Bloch vectors of shape ``(m, n, 4)``; ``n = 1`` is the
    single-qubit problem. Working with logs keeps 60-site products finite.
    """

    def __init__(self, targets: np.ndarray):
        self.shape = targets.shape[:2]
        flat = targets.reshape(-1, 4)
        self.unique, self.inverse = np.unique(flat, axis=0, return_inverse=True)
        self.inverse = self.inverse.reshape(self.shape)
        self.constant = bool(np.allclose(targets[..., 1:], 0))

    def __call__(self, effect_bloch: np.ndarray) -> float:
        s = _qubit.shadow_bloch(effect_bloch)
        if s is None:
            return np.inf
        with np.errstate(divide="ignore"):
            logs = np.log(_qubit.projection_norms(effect_bloch, s, self.unique))
        return float(np.max(logs[self.inverse].sum(axis=1)))


def _repair(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map arbitrary weights/directions onto the feasible set.

    Directions are projected to the unit ball, weights renormalized to 2,
    and the weighted mean direction removed; a final common rescaling keeps
    every direction inside the ball without breaking ``sum w v = 0``.
    """
    w = 2 * w / w.sum()
    for _ in range(REPAIR_ROUNDS):
        n = np.sqrt((v * v).sum(axis=1))
        v = v / np.maximum(n, 1)[:, None]
        v = v - (w @ v) / 2
    n = np.sqrt((v * v).sum(axis=1)).max()
    if n > 1:
        v = v / n
    return w, v


def _effect_bloch(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    e = np.empty((len(w), 4))
    e[:, 0] = w
    e[:, 1:] = w[:, None] * v
    return e


def _random_start(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return _repair(np.full(n, 2 / n), v)


def _propose(rng, w, v, scale):
    """Perturb one direction or one weight, occasionally resample a direction."""
    k = rng.integers(len(w))
    w, v = w.copy(), v.copy()
    u = rng.random()
    if u < 0.7:
        v[k] += scale * rng.standard_normal(3)
    elif u < 0.95:
        # reflect at zero so a weight never sticks to the boundary
        w[k] = abs(w[k] + scale * rng.standard_normal() * 2 / len(w))
    else:
        d = rng.standard_normal(3)
        v[k] = d / np.sqrt(d @ d)
    return _repair(w, v)


def _anneal_once(objective: _Objective, config: AnnealConfig, rng: np.random.Generator):
    w, v = _random_start(rng, config.outcomes)
    cur = objective(_effect_bloch(w, v))
    t0 = config.initial_temperature
    if t0 == 0:
        deltas = []
        for _ in range(100):
            w2, v2 = _propose(rng, w, v, config.move_scale)
            f = objective(_effect_bloch(w2, v2))
            if np.isfinite(f) and np.isfinite(cur):
                deltas.append(abs(f - cur))
        t0 = float(np.percentile(deltas, 90)) if deltas else 1.0
        t0 = t0 if t0 > 0 else 1.0
    temp = t0
    best = (cur, w, v)
    trace = [(0, float(np.exp(cur)))]
    stage = max(1, config.iterations // config.cooling_steps)
    for it in range(1, config.iterations + 1):
        scale = config.move_scale * max(np.sqrt(temp / t0), config.min_move_scale)
        w2, v2 = _propose(rng, w, v, scale)
        f = objective(_effect_bloch(w2, v2))
        if f <= cur or rng.random() < np.exp(-(f - cur) / temp):
            w, v, cur = w2, v2, f
            if cur < best[0]:
                best = (cur, w, v)
                trace.append((it, float(np.exp(cur))))
        if it % stage == 0:
            temp *= config.cooling_ratio
    return best, trace


def _run(targets: np.ndarray, config: AnnealConfig) -> OptimizationResult:
    objective = _Objective(targets)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    if objective.constant:
        warnings.warn("all targets are proportional to the identity; objective is constant", stacklevel=3)
        w, v = _random_start(ops.make_rng(seeds[0]), config.outcomes)
        f = float(np.exp(objective(_effect_bloch(w, v))))
        params = QubitPovmParams(w, v)
        return OptimizationResult(params.to_povm(), f, [(0, f)], [f], params)
    results = []
    for i, s in enumerate(seeds):
        best, trace = _anneal_once(objective, config, ops.make_rng(s))
        log.debug("restart %d: best objective %.6g", i, np.exp(best[0]))
        results.append((best, trace))
    i_best = min(range(len(results)), key=lambda i: results[i][0][0])
    (f, w, v), trace = results[i_best]
    params = QubitPovmParams(w, v)
    return OptimizationResult(
        best_povm=params.to_povm(),
        best_objective=float(np.exp(f)),
        objective_trace=trace,
        restarts_summary=[float(np.exp(r[0][0])) for r in results],
        best_params=params,
    )


def _bloch_targets(observables) -> np.ndarray:
    obs = np.asarray(observables, dtype=complex)
    if obs.ndim == 2:
        obs = obs[None]
    if obs.ndim != 3 or obs.shape[1:] != (2, 2):
        raise DimensionError("targets must be qubit observables")
    return np.array([ops.to_bloch(ops.hermitian(x)) for x in obs])


def objective(povm: Povm, observables) -> float:
    """Largest squared shadow norm over ``observables``."""
    obs = np.asarray(observables, dtype=complex)
    if obs.ndim == 2:
        obs = obs[None]
    if len(obs) == 0:
        raise ValueError("need at least one observable")
    return max(squared_shadow_norm(povm, x).squared_norm for x in obs)


def anneal_single_qubit(observables, config: AnnealConfig = AnnealConfig()) -> OptimizationResult:
    """Search for the qubit POVM minimizing the worst squared shadow norm over ``observables``."""
    targets = _bloch_targets(observables)[:, None, :]
    return _run(targets, config)


def anneal_factorized(n_sites: int, site_factors, config: AnnealConfig = AnnealConfig()) -> OptimizationResult:
    """Optimize one qubit POVM applied identically to ``n_sites`` qubits.

    ``site_factors[i]`` lists the ``n_sites`` single-qubit factors of the
    ``i``-th target observable ``X_i = X_i1 x X_i2 x ...``. Cost per
    objective evaluation is linear in sites and in observables.
    """
    targets = []
    for i, factors in enumerate(site_factors):
        factors = np.asarray(factors, dtype=complex)
        if factors.ndim != 3 or len(factors) != n_sites or factors.shape[1:] != (2, 2):
            raise NotFactorizedError(
                f"observable {i} must be given as {n_sites} single-qubit factors"
            )
        targets.append(_bloch_targets(factors))
    if not targets:
        raise ValueError("need at least one observable")
    return _run(np.array(targets), config)


def factorized_objective(povm: Povm, site_factors) -> float:
    """Largest product of per-site squared norms over factorized targets."""
    return max(
        float(np.prod([squared_shadow_norm(povm, x).squared_norm for x in factors]))
        for factors in site_factors
    )


def _kabsch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Proper rotation ``R`` minimizing ``|a R^T - b|``."""
    u, _, vt = np.linalg.svd(b.T @ a)
    d = np.sign(np.linalg.det(u @ vt)) or 1.0
    return u @ np.diag([1, 1, d]) @ vt


def vertex_distance(povm: Povm, reference, allow_rotation: bool = False) -> float:
    """Largest distance between matched POVM vertices and ``reference`` unit vectors.

    POVM vertices are ``(N w_k / 2) v_k`` so a uniform unit-vector POVM sits
    exactly on its reference. Matching is over permutations, and optionally
    over proper rotations of the POVM.
    """
    params = QubitPovmParams.from_povm(povm)
    n = len(params.weights)
    pts = (n * params.weights / 2)[:, None] * params.directions
    ref = np.asarray(reference, dtype=float)
    if ref.shape != pts.shape:
        return np.inf
    if not allow_rotation:
        cost = np.linalg.norm(pts[:, None] - ref[None], axis=2)
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].max())
    if n > 8:
        raise ValueError("rotation matching is limited to 8 outcomes")
    best = np.inf
    for perm in itertools.permutations(range(n)):
        r = _kabsch(pts, ref[list(perm)])
        best = min(best, float(np.linalg.norm(pts @ r.T - ref[list(perm)], axis=1).max()))
    return best


def check_result(result: OptimizationResult, observables=None) -> bool:
    """Verify validity, informational completeness and the reported objective."""
    p = result.best_povm
    ok = is_informationally_complete(p)
    if observables is not None:
        ok = ok and abs(objective(p, observables) - result.best_objective) <= 1e-9 * max(1, result.best_objective)
    return bool(ok)
