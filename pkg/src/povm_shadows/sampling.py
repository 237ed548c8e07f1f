"""Monte-Carlo measurement simulation and shadow-based observable estimation.

Outcome records are integer arrays of shape ``(M, n)``: one row per shot,
one zero-based outcome index per site. Estimates for product observables
``X1 x X2 x ...`` are products of per-site shadow expectations, so nothing
of size ``2**n`` is ever formed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import operators as ops
from .errors import ConfigError, DimensionError, EmptyDataError, InvalidStateError
from .norms import squared_shadow_norm
from .povm import Povm, tensor_povm
from .shadows import ClassicalShadowSet, classical_shadows

PROBABILITY_CLAMP = 1e-12
MAX_JOINT_SITES = 12


@dataclass(frozen=True)
class EstimatorConfig:
    shots: int
    median_groups: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ConfigError("shots must be positive")
        if not 1 <= self.median_groups <= self.shots:
            raise ConfigError("median_groups must lie in [1, shots]")


def _site_probabilities(povm: Povm, rho) -> np.ndarray:
    p = povm.probabilities(rho)
    if p.min() < -PROBABILITY_CLAMP:
        raise InvalidStateError(f"negative outcome probability {p.min():.3g}")
    p = np.clip(p, 0, None)
    return p / p.sum()


def _inverse_cdf(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, u, side="right")


def sample_outcomes(povms: Sequence[Povm], states: Sequence, config: EstimatorConfig) -> np.ndarray:
    """Sample ``config.shots`` outcome strings from a product state.

    Site ``i`` is measured with ``povms[i]`` on ``states[i]``; sites are
    independent. Deterministic for a fixed ``config.seed``.
    """
    if len(povms) != len(states):
        raise DimensionError("need one state per POVM")
    probs = []
    for p, rho in zip(povms, states):
        rho = ops.check_density_matrix(rho)
        if rho.shape[0] != p.dim:
            raise DimensionError("state dimension does not match POVM")
        probs.append(_site_probabilities(p, rho))
    u = ops.make_rng(config.seed).random((config.shots, len(povms)))
    out = np.empty((config.shots, len(povms)), dtype=np.int64)
    for i, p in enumerate(probs):
        out[:, i] = _inverse_cdf(p, u[:, i])
    return out


def sample_joint_outcomes(povms: Sequence[Povm], state, config: EstimatorConfig) -> np.ndarray:
    """Sample outcome strings from a possibly entangled ``n``-site state.

    Builds the joint POVM explicitly, so it is limited to small systems
    (at most :data:`MAX_JOINT_SITES` sites and the operator size cap).
    """
    if len(povms) > MAX_JOINT_SITES:
        raise DimensionError(f"joint sampling supports at most {MAX_JOINT_SITES} sites")
    joint = tensor_povm(povms)
    rho = ops.check_density_matrix(state)
    if rho.shape[0] != joint.dim:
        raise DimensionError("state dimension does not match the joint POVM")
    p = _site_probabilities(joint, rho)
    u = ops.make_rng(config.seed).random(config.shots)
    flat = _inverse_cdf(p, u)
    return np.stack(np.unravel_index(flat, [q.n_outcomes for q in povms]), axis=1)


def _expectation_tables(shadowsets: Sequence[ClassicalShadowSet], factors) -> list[np.ndarray]:
    if len(shadowsets) != len(factors):
        raise DimensionError("need one factor per site")
    tables = []
    for s, x in zip(shadowsets, factors):
        x = np.asarray(x, dtype=complex)
        if x.shape != s.shadows.shape[1:]:
            raise DimensionError("factor dimension does not match site")
        tables.append(s.expectations(x))
    return tables


def single_shot_estimate(shadowsets: Sequence[ClassicalShadowSet], record, factors) -> float:
    """``prod_i tr(rho^(i)_{k_i} X^(i))`` for one outcome string."""
    record = np.asarray(record)
    if record.shape != (len(shadowsets),):
        raise DimensionError("record length does not match number of sites")
    tables = _expectation_tables(shadowsets, factors)
    return float(np.prod([t[k] for t, k in zip(tables, record)]))


def shot_estimates(shadowsets: Sequence[ClassicalShadowSet], records, factors) -> np.ndarray:
    """Vectorized :func:`single_shot_estimate` over an ``(M, n)`` record array."""
    records = np.asarray(records)
    tables = _expectation_tables(shadowsets, factors)
    est = np.ones(len(records))
    for i, t in enumerate(tables):
        est *= t[records[:, i]]
    return est


def estimate_mean(estimates, median_groups: int | EstimatorConfig = 1) -> float:
    """Plain mean (one group) or median of means over consecutive equal blocks.

    When the number of estimates is not divisible by the group count the
    trailing remainder is dropped with a warning.
    """
    k = median_groups.median_groups if isinstance(median_groups, EstimatorConfig) else median_groups
    x = np.asarray(estimates, dtype=float).ravel()
    if x.size == 0:
        raise EmptyDataError("no estimates to average")
    if not 1 <= k <= x.size:
        raise ConfigError("number of groups must lie in [1, number of estimates]")
    if k == 1:
        return math.fsum(x) / x.size
    size = x.size // k
    if size * k != x.size:
        warnings.warn(
            f"dropping {x.size - size * k} trailing estimates so {k} groups are equal",
            stacklevel=2,
        )
    means = [math.fsum(x[g * size : (g + 1) * size]) / size for g in range(k)]
    return float(np.median(means))


def simulate(povms: Sequence[Povm], states: Sequence, factors, config: EstimatorConfig) -> dict:
    """Sample, estimate ``<X1 x X2 x ...>`` and report the spread of single shots."""
    shadowsets = [classical_shadows(p) for p in povms]
    records = sample_outcomes(povms, states, config)
    est = shot_estimates(shadowsets, records, factors)
    norm = float(np.prod([squared_shadow_norm(p, x).squared_norm for p, x in zip(povms, factors)]))
    return {
        "estimate": estimate_mean(est, config.median_groups),
        "empirical_variance": float(np.var(est, ddof=1)) if len(est) > 1 else 0.0,
        "shots": config.shots,
        "seed": config.seed,
        "squared_shadow_norm": norm,
    }
