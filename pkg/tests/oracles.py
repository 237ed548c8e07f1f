"""Independent reference computations used only by the tests.

Nothing here imports the library's basis, frame or shadow code: the frame
operator is built on matrix units (column-stacked vectorization) as a
complex ``D^2 x D^2`` matrix and inverted with a plain linear solve.
"""

import numpy as np


def brute_frame(effects):
    """C with C vec(X) = vec(sum_k tr(X E_k) E_k) in the matrix-unit basis."""
    effects = np.asarray(effects, dtype=complex)
    d = effects.shape[-1]
    c = np.zeros((d * d, d * d), dtype=complex)
    for e in effects:
        # tr(X E) = vec(E^T) . vec(X)
        c += np.outer(e.flatten(order="F"), e.T.flatten(order="F"))
    return c


def brute_apply(effects, x):
    return sum(np.trace(x @ e) * e for e in effects)


def brute_shadows(effects):
    effects = np.asarray(effects, dtype=complex)
    d = effects.shape[-1]
    c = brute_frame(effects)
    return np.array(
        [np.linalg.solve(c, e.flatten(order="F")).reshape(d, d, order="F") for e in effects]
    )


def brute_norm_operator(effects, x):
    s = brute_shadows(effects)
    t = np.array([np.trace(r @ x).real for r in s])
    return sum(tk**2 * e for tk, e in zip(t, effects))


def brute_squared_norm(effects, x):
    return float(np.max(np.linalg.eigvalsh(brute_norm_operator(effects, x))))
