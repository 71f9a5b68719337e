# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

duhamel_scan
    Per-mode exponential-integrator recurrence over the nodes of a
    piecewise-linear source.
cn_march
    Crank-Nicolson time march for the 1D heat equation with Dirichlet data,
    using a constant-coefficient Thomas solve.

Both functions mirror ``parafvp._kernels_py`` exactly; the Python versions are
the reference.
"""
import numpy as np


def duhamel_scan(const double[::1] decay,
                 const double[::1] w_left,
                 const double[::1] w_right,
                 const double complex[::1] u0,
                 const double complex[:, ::1] values):
    """Return node states of shape (M+1, n) for sources ``values`` (M+1, n)."""
    cdef Py_ssize_t n = u0.shape[0]
    cdef Py_ssize_t n_nodes = values.shape[0]
    cdef Py_ssize_t m, j
    out = np.empty((n_nodes, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for j in range(n):
        o[0, j] = u0[j]
    for m in range(n_nodes - 1):
        for j in range(n):
            o[m + 1, j] = (decay[j] * o[m, j]
                           + w_left[j] * values[m, j]
                           + w_right[j] * values[m + 1, j])
    return out


def cn_march(const double[::1] u_init,
             double r,
             double dt,
             const double[::1] left,
             const double[::1] right,
             const double[:, ::1] source):
    """March interior values through ``left.shape[0] - 1`` CN steps.

    ``source`` holds the forcing at interior nodes for every time level.
    Returns the interior values at the final level.
    """
    cdef Py_ssize_t n = u_init.shape[0]
    cdef Py_ssize_t n_steps = left.shape[0] - 1
    cdef Py_ssize_t s, i
    cdef double half = 0.5 * r
    cdef double diag = 1.0 + r
    cdef double off = -half

    cp_arr = np.empty(n, dtype=np.float64)
    denom_arr = np.empty(n, dtype=np.float64)
    u_arr = np.array(u_init, dtype=np.float64)
    rhs_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cp = cp_arr
    cdef double[::1] denom = denom_arr
    cdef double[::1] u = u_arr
    cdef double[::1] rhs = rhs_arr
    cdef double lo, hi

    denom[0] = diag
    cp[0] = off / diag
    for i in range(1, n):
        denom[i] = diag - off * cp[i - 1]
        cp[i] = off / denom[i]

    for s in range(n_steps):
        for i in range(n):
            lo = u[i - 1] if i > 0 else left[s]
            hi = u[i + 1] if i < n - 1 else right[s]
            rhs[i] = (u[i] + half * (lo - 2.0 * u[i] + hi)
                      + 0.5 * dt * (source[s, i] + source[s + 1, i]))
        rhs[0] += half * left[s + 1]
        rhs[n - 1] += half * right[s + 1]
        # forward sweep, then back substitution
        rhs[0] = rhs[0] / denom[0]
        for i in range(1, n):
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom[i]
        u[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            u[i] = rhs[i] - cp[i] * u[i + 1]
    return u_arr
