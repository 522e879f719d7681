"""Pure numpy versions of the hot loops.

Each function matches the signature of its counterpart in ``_ckernels.pyx``.
"""
import numpy as np


def triad_apply(q, i, j, coef, u, m):
    """out[q] = sum over entries of coef * u[i] * u[j]."""
    return np.bincount(q, weights=coef * u[i] * u[j], minlength=m)


def triad_apply_batch(q, i, j, coef, states, m):
    """Row-wise ``triad_apply`` for a 2-D stack of states."""
    out = np.empty((states.shape[0], m))
    for r in range(states.shape[0]):
        out[r] = triad_apply(q, i, j, coef, states[r], m)
    return out


def triad_jacobian(q, i, j, coef, u, m):
    """Derivative of ``triad_apply`` with respect to u, as a dense m x m array."""
    flat = np.bincount(q * m + i, weights=coef * u[j], minlength=m * m)
    flat += np.bincount(q * m + j, weights=coef * u[i], minlength=m * m)
    return flat.reshape(m, m)


def kahan_cumsum(x):
    """Prefix sums with compensated (Kahan-Babuska) accumulation."""
    out = np.empty(len(x))
    total = 0.0
    comp = 0.0
    for k, v in enumerate(np.asarray(x, dtype=float).tolist()):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[k] = total + comp
    return out
