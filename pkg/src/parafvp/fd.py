"""Crank-Nicolson finite differences for u_t = u_xx + f on (0, L).

An independent grid-based solver for cross-checking the spectral forward
solver with Dirichlet data. Real and imaginary parts are marched separately.
"""
import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .eigenbasis import SpectralVector, project
from .errors import InvalidArgumentError
from .forward import _as_vector


def crank_nicolson(es, u0, f, g, T, n_points=201, dt=1e-3, backend=None):
    """Grid solution at time T; returns ``(x, values)`` with boundary nodes.

    ``u0`` is a SpectralVector, coefficient array or None; ``f`` a ModalSignal or None;
    ``g`` is a BoundarySignal or None.
    """
    if es.domain_kind != "interval":
        raise InvalidArgumentError("the finite-difference oracle is one-dimensional")
    L = es.lengths[0]
    x = np.linspace(0.0, L, n_points)
    h = x[1] - x[0]
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-9 * T:
        raise InvalidArgumentError("T must be a whole number of time steps")
    t = np.linspace(0.0, T, steps + 1)
    E = es.evaluate(x[1:-1])
    u_init = np.zeros(n_points - 2, dtype=complex) if u0 is None else E @ _as_vector(es, u0).coeffs
    src = np.zeros((steps + 1, n_points - 2), dtype=complex) if f is None else f.at(t) @ E.T
    if g is None:
        left = right = np.zeros(steps + 1, dtype=complex)
    else:
        gt = g.times
        left = np.interp(t, gt, g.left.real) + 1j * np.interp(t, gt, g.left.imag)
        right = np.interp(t, gt, g.right.real) + 1j * np.interp(t, gt, g.right.imag)
    r = dt / h**2
    parts = []
    for part in (np.real, np.imag):
        parts.append(kernels.cn_march(part(u_init), r, dt, part(left), part(right),
                                      part(src), backend=backend))
    values = np.empty(n_points, dtype=complex)
    values[1:-1] = parts[0] + 1j * parts[1]
    values[0], values[-1] = left[-1], right[-1]
    return x, values


def grid_to_modes(es, x, values):
    """Spline grid values onto the quadrature grid and project."""
    xq, _ = es.quad_grid
    re = CubicSpline(x, values.real)(xq)
    im = CubicSpline(x, values.imag)(xq)
    return SpectralVector(project(es, re).coeffs + 1j * project(es, im).coeffs, es)
