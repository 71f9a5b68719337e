"""Forward problem u' + Au = f, u(0) = u0, solved mode by mode.

Sources are piecewise linear in time, so the Duhamel integral over each
segment has a closed form and the solver is exact up to roundoff.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import kernels
from .eigenbasis import SpectralVector
from .errors import InvalidArgumentError

SERIES_BELOW = 0.1
_SERIES_TERMS = 12
_FACT = np.array([math.factorial(n) for n in range(_SERIES_TERMS + 3)], dtype=float)


def segment_weights(lam, delta):
    """Exact weights for one piecewise-linear segment of length ``delta``.

    Returns ``(decay, w_left, w_right)`` broadcast over ``lam`` and ``delta``
    such that ``int_0^delta e^{-lam(delta-s)} f(s) ds = w_left*f(0) +
    w_right*f(delta)`` for linear f.
    """
    lam = np.asarray(lam, dtype=float)
    delta = np.asarray(delta, dtype=float)
    z = lam * delta
    decay = np.exp(-z)
    small = z < SERIES_BELOW
    zs = np.where(small, z, 0.0)
    n = np.arange(_SERIES_TERMS)
    powers = (-zs[..., None]) ** n
    phi1_series = np.sum(powers / _FACT[n + 1], axis=-1)
    psi_series = np.sum(powers * (n + 1) / _FACT[n + 2], axis=-1)
    zb = np.where(small, 1.0, z)
    phi1_big = -np.expm1(-zb) / zb
    psi_big = (-np.expm1(-zb) - zb * np.exp(-zb)) / zb**2
    phi1 = np.where(small, phi1_series, phi1_big)
    psi = np.where(small, psi_series, psi_big)
    return decay, delta * psi, delta * (phi1 - psi)


@dataclass(frozen=True, eq=False)
class ModalSignal:
    """Per-mode source f_j(t), piecewise linear on a uniform grid over [0, T].

    ``values`` has shape (n_modes, M+1).
    """

    horizon: float
    values: np.ndarray
    basis: object

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 2 or vals.shape[0] != self.basis.n_modes:
            raise InvalidArgumentError(
                f"values must have shape ({self.basis.n_modes}, M+1), got {vals.shape}")
        if vals.shape[1] < 2:
            raise InvalidArgumentError("a modal signal needs M >= 1 segments")
        if not self.horizon > 0:
            raise InvalidArgumentError("horizon T must be positive")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("signal values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "horizon", float(self.horizon))

    @classmethod
    def zeros(cls, basis, T, M=1):
        return cls(T, np.zeros((basis.n_modes, M + 1)), basis)

    @classmethod
    def constant(cls, basis, T, coeffs, M=1):
        c = np.asarray(coeffs, dtype=complex).reshape(-1, 1)
        return cls(T, np.repeat(c, M + 1, axis=1), basis)

    @classmethod
    def from_function(cls, basis, T, M, fn):
        """Sample ``fn(t) -> coefficient array`` at the M+1 nodes."""
        times = np.linspace(0.0, T, M + 1)
        return cls(T, np.column_stack([np.asarray(fn(t), dtype=complex) for t in times]),
                   basis)

    @property
    def M(self):
        return self.values.shape[1] - 1

    @property
    def dt(self):
        return self.horizon / self.M

    @property
    def times(self):
        return np.linspace(0.0, self.horizon, self.M + 1)

    def at(self, t):
        """Coefficients at times ``t``; shape (len(t), n_modes)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        m, tau = self._locate(t)
        frac = (tau / self.dt)[:, None]
        v = self.values.T
        return (1.0 - frac) * v[m] + frac * v[m + 1]

    def _locate(self, t):
        m = np.clip(np.floor(t / self.dt).astype(int), 0, self.M - 1)
        return m, np.maximum(t - m * self.dt, 0.0)

    def vstar_norm(self):
        """Exact ||f||_{L2(0,T;V*)} of the piecewise-linear signal."""
        a, b = self.values[:, :-1], self.values[:, 1:]
        seg = (np.abs(a) ** 2 + np.real(a * np.conj(b)) + np.abs(b) ** 2) * self.dt / 3.0
        return float(math.sqrt(np.sum(np.sum(seg, axis=1) / self.basis.eigenvalues)))

    def shifted(self, node):
        """The signal restricted to [t_node, T] and re-based to start at 0."""
        if not 0 <= node < self.M:
            raise InvalidArgumentError("node must leave at least one segment")
        return ModalSignal(self.horizon - node * self.dt, self.values[:, node:], self.basis)

    def __add__(self, other):
        self.basis.check_same(other.basis)
        if other.values.shape != self.values.shape or other.horizon != self.horizon:
            raise InvalidArgumentError("signals live on different time grids")
        return ModalSignal(self.horizon, self.values + other.values, self.basis)

    def scaled_modes(self, factors):
        return ModalSignal(self.horizon, self.values * np.asarray(factors)[:, None],
                           self.basis)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States at ``times``; ``coeffs`` has shape (len(times), n_modes)."""

    times: np.ndarray
    coeffs: np.ndarray
    basis: object

    def state(self, i):
        return SpectralVector(self.coeffs[i], self.basis)

    @property
    def states(self):
        return [self.state(i) for i in range(len(self.times))]

    @property
    def final(self):
        return self.state(-1)

    def __add__(self, other):
        self.basis.check_same(other.basis)
        if not np.array_equal(self.times, other.times):
            raise InvalidArgumentError("trajectories have different time grids")
        return Trajectory(self.times, self.coeffs + other.coeffs, self.basis)


def _as_vector(es, v):
    if v is None:
        return SpectralVector.zeros(es)
    if isinstance(v, SpectralVector):
        es.check_same(v.basis)
        return v
    return SpectralVector(v, es)


def duhamel_solve(es, u0, f, out_grid, backend=None):
    """Solve u' + Au = f from u(0) = u0; states at the times in ``out_grid``.

    ``f`` may be None for the homogeneous problem, in which case any
    nonnegative output time is allowed.
    """
    u0 = _as_vector(es, u0)
    out = np.atleast_1d(np.asarray(out_grid, dtype=float))
    lam = es.eigenvalues
    if f is None:
        if np.any(out < 0):
            raise InvalidArgumentError("output times must be nonnegative")
        return Trajectory(out, np.exp(-np.outer(out, lam)) * u0.coeffs, es)
    es.check_same(f.basis)
    T = f.horizon
    tol = 1e-12 * T
    if np.any(out < -tol) or np.any(out > T + tol):
        raise InvalidArgumentError(f"output times must lie in [0, {T}]")
    out = np.clip(out, 0.0, T)
    decay, wl, wr = segment_weights(lam, f.dt)
    nodes = kernels.duhamel_scan(decay, wl, wr, u0.coeffs, f.values.T, backend=backend)
    m, tau = f._locate(out)
    d_p, wl_p, wr_p = segment_weights(lam[None, :], tau[:, None])
    f_end = f.at(out)
    vals = d_p * nodes[m] + wl_p * f.values.T[m] + wr_p * f_end
    return Trajectory(out, vals, es)


def yield_map(es, f):
    """y_f = int_0^T e^{-(T-s)A} f(s) ds."""
    return duhamel_solve(es, None, f, [f.horizon]).final


def yield_bound_constant(es, T):
    """Sharp c in |y_f| <= c ||f||_{L2(0,T;V*)} for the truncated model."""
    return float(np.sqrt(np.max(-np.expm1(-2.0 * es.eigenvalues * T) / 2.0)))


def x_norm_parts(traj, f=None):
    """Squared pieces of ||u||_X on the trajectory's time grid.

    u' is taken from the equation, u'_j = f_j - lambda_j u_j. Time integrals
    use composite Simpson.
    """
    lam = traj.basis.eigenvalues
    u = traj.coeffs
    t = traj.times
    u2 = np.abs(u) ** 2
    du = -lam * u if f is None else f.at(t) - lam * u
    l2_v = simpson(np.sum(lam * u2, axis=1), x=t)
    sup_h = float(np.max(np.sum(u2, axis=1)))
    h1 = simpson(np.sum((u2 + np.abs(du) ** 2) / lam, axis=1), x=t)
    return {"l2_v": float(l2_v), "sup_h": sup_h, "h1_vstar": float(h1)}


def x_norm(traj, f=None):
    parts = x_norm_parts(traj, f)
    return math.sqrt(parts["l2_v"] + parts["sup_h"] + parts["h1_vstar"])


def x_norm_constant(es, T):
    """c with ||u||_X^2 <= c (|u0|^2 + ||f||^2) under the |||.||| normalisation.

    From the energy estimate: sup|u|^2 and ||u||_{L2(V)}^2 are each bounded by
    |u0|^2 + ||f||^2, ||u'||_{L2(V*)}^2 by 2|u0|^2 + 4||f||^2 and
    ||u||_{L2(V*)}^2 by (T/lambda_1)(|u0|^2 + ||f||^2).
    """
    return 6.0 + T / float(es.eigenvalues[0])


@dataclass(frozen=True)
class StabilityReport:
    sup_lhs: float
    l2v_lhs: float
    rhs: float
    sup_ratio: float
    l2v_ratio: float
    slack: float = 1e-8

    @property
    def passed(self):
        return max(self.sup_ratio, self.l2v_ratio) <= 1.0 + self.slack


def _ratio(lhs, rhs):
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def stability_check(es, u0, f, traj):
    """Energy inequalities sup|u|^2, ||u||^2_{L2(V)} <= |u0|^2 + ||f||^2_{L2(V*)}."""
    u0 = _as_vector(es, u0)
    parts = x_norm_parts(traj, f)
    f2 = 0.0 if f is None else f.vstar_norm() ** 2
    rhs = u0.norm() ** 2 + f2
    return StabilityReport(
        sup_lhs=parts["sup_h"],
        l2v_lhs=parts["l2_v"],
        rhs=rhs,
        sup_ratio=_ratio(parts["sup_h"], rhs),
        l2v_ratio=_ratio(parts["l2_v"], rhs),
    )


@dataclass(frozen=True)
class SmoothingReport:
    lhs: float
    rhs: float
    c5: float
    argmax_t: float

    @property
    def ratio(self):
        return _ratio(self.lhs, self.rhs)

    @property
    def passed(self):
        return self.ratio <= 1.0 + 1e-8


def smoothing_constant(es, T):
    """C5 = C2/C1 + 2T C3 with C1 = lambda_1^{-1/2}, C2 = lambda_1^{-1}, C3 = 1.

    C2/C1 is replaced by max(C2/C1, (C2/C1)^2) so the bound stays valid
    when lambda_1 < 1.
    """
    q = float(es.eigenvalues[0]) ** -0.5
    return max(q, q * q) + 2.0 * T


def smoothing_inequality_check(es, u0, T, n_grid=2001):
    """sup_t (T-t)|e^{-tA}u0|^2 <= C5 int_0^T ||e^{-tA}u0||^2 dt."""
    from scipy.optimize import minimize_scalar

    u0 = _as_vector(es, u0)
    if u0.norm() == 0:
        raise InvalidArgumentError("u0 must be nonzero")
    lam = es.eigenvalues
    c2 = np.abs(u0.coeffs) ** 2

    def g(t):
        return (T - t) * np.sum(c2 * np.exp(-2.0 * lam * t))

    grid = np.linspace(0.0, T, n_grid)
    vals = (T - grid) * (np.exp(-2.0 * np.outer(grid, lam)) @ c2)
    i = int(np.argmax(vals))
    best_t, best = grid[i], vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -g(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun > best:
            best_t, best = float(res.x), float(-res.fun)
    integral = float(np.sum(c2 * -np.expm1(-2.0 * lam * T)) / 2.0)
    c5 = smoothing_constant(es, T)
    return SmoothingReport(lhs=float(best), rhs=c5 * integral, c5=c5, argmax_t=float(best_t))

