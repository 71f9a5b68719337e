"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np
from scipy.linalg import solve_banded


def duhamel_scan(decay, w_left, w_right, u0, values):
    """Return node states of shape (M+1, n) for sources ``values`` (M+1, n)."""
    values = np.asarray(values, dtype=complex)
    out = np.empty_like(values)
    out[0] = u0
    for m in range(values.shape[0] - 1):
        out[m + 1] = decay * out[m] + w_left * values[m] + w_right * values[m + 1]
    return out


def cn_march(u_init, r, dt, left, right, source):
    """March interior values through ``len(left) - 1`` Crank-Nicolson steps."""
    u = np.array(u_init, dtype=float)
    n = u.size
    half = 0.5 * r
    ab = np.empty((3, n))
    ab[0] = -half
    ab[1] = 1.0 + r
    ab[2] = -half
    padded = np.empty(n + 2)
    for s in range(len(left) - 1):
        padded[0] = left[s]
        padded[1:-1] = u
        padded[-1] = right[s]
        rhs = u + half * (padded[:-2] - 2.0 * u + padded[2:])
        rhs += 0.5 * dt * (source[s] + source[s + 1])
        rhs[0] += half * left[s + 1]
        rhs[-1] += half * right[s + 1]
        u = solve_banded((1, 1), ab, rhs, check_finite=False)
    return u
