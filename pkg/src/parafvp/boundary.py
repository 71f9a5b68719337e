"""Dirichlet boundary data on the interval.

K0 is the harmonic (affine) extension of the endpoint values. Per mode the
boundary enters as u_j' = -lambda_j u_j + f_j + lambda_j (K0 g)_j, and the
boundary yield is z_g = -lambda * int_0^T e^{-lambda(T-s)} (K0 g)(s) ds, so
that u(T) = e^{-TA} u0 + y_f - z_g.
"""
import math
from dataclasses import dataclass

import numpy as np

from .eigenbasis import SpectralVector
from .errors import InvalidArgumentError, UnsupportedDomainError
from .forward import ModalSignal, duhamel_solve


@dataclass(frozen=True, eq=False)
class BoundarySignal:
    """Endpoint values g(t, 0), g(t, L), piecewise linear on a uniform grid."""

    horizon: float
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = np.array(self.left, dtype=complex).ravel()
        right = np.array(self.right, dtype=complex).ravel()
        if left.shape != right.shape:
            raise InvalidArgumentError("left and right must have the same length")
        if left.size < 2:
            raise InvalidArgumentError("a boundary signal needs M >= 1 segments")
        if not self.horizon > 0:
            raise InvalidArgumentError("horizon T must be positive")
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise InvalidArgumentError("boundary values must be finite")
        for a in (left, right):
            a.setflags(write=False)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "horizon", float(self.horizon))

    @classmethod
    def constant(cls, T, left, right, M=1):
        return cls(T, np.full(M + 1, left, dtype=complex), np.full(M + 1, right, dtype=complex))

    @classmethod
    def from_function(cls, T, M, fn):
        """Sample ``fn(t) -> (left, right)`` at the M+1 nodes."""
        vals = np.array([fn(t) for t in np.linspace(0.0, T, M + 1)], dtype=complex)
        return cls(T, vals[:, 0], vals[:, 1])

    @property
    def M(self):
        return self.left.size - 1

    @property
    def dt(self):
        return self.horizon / self.M

    @property
    def times(self):
        return np.linspace(0.0, self.horizon, self.M + 1)

    def is_zero(self):
        return not (np.any(self.left) or np.any(self.right))

    def __mul__(self, scalar):
        return BoundarySignal(self.horizon, scalar * self.left, scalar * self.right)

    __rmul__ = __mul__


def _require_interval(es):
    if es.domain_kind != "interval":
        raise UnsupportedDomainError(
            "boundary data are only supported on the interval (rectangles need g = 0)")


def _extension_factors(es):
    # c_k = a_k*left + b_k*right for the affine function with those end values
    L = es.lengths[0]
    k = es.mode_index[:, 0].astype(float)
    a = math.sqrt(2.0 / L) * L / (k * math.pi)
    b = a * np.where(es.mode_index[:, 0] % 2 == 1, 1.0, -1.0)
    return a, b


def poisson_extend(es, left, right):
    """Coefficients of w(x) = left + (right - left) x/L."""
    _require_interval(es)
    a, b = _extension_factors(es)
    return SpectralVector(left * a + right * b, es)


def extension_signal(es, g):
    """K0 g(t) as a ModalSignal on the grid of ``g``."""
    _require_interval(es)
    a, b = _extension_factors(es)
    return ModalSignal(g.horizon, np.outer(a, g.left) + np.outer(b, g.right), es)


def _boundary_forcing(es, g):
    return extension_signal(es, g).scaled_modes(es.eigenvalues)


@dataclass(frozen=True)
class EpsTrace:
    """Gaps |z_g(eps) - z_g| of the truncated integrals over [0, T - eps]."""

    eps: np.ndarray
    gap: np.ndarray
    bound: np.ndarray
    inv_lambda_max: float

    @property
    def ratios(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.gap[1:] / self.gap[:-1]

    def monotone(self, below=np.inf):
        """Gaps nonincreasing over the schedule entries with eps <= ``below``."""
        g = self.gap[self.eps <= below]
        return bool(np.all(np.diff(g) <= 0))


@dataclass(frozen=True)
class BoundaryYield:
    z_g: SpectralVector
    eps_trace: EpsTrace


def _eps_schedule(T, lam_max, depth=6):
    # halve from T/2 until eps sits well below 1/lambda_N
    stop = min(T, 1.0 / lam_max) * 2.0**-depth
    eps = [T / 2.0]
    while eps[-1] > stop:
        eps.append(eps[-1] / 2.0)
    return np.array(eps)


def boundary_yield(es, g, T=None):
    """z_g with the convergence table of its eps-truncations."""
    if g is None or (es.domain_kind != "interval" and g.is_zero()):
        z = SpectralVector.zeros(es)
        return BoundaryYield(z, EpsTrace(np.zeros(0), np.zeros(0), np.zeros(0), 0.0))
    T = g.horizon if T is None else float(T)
    if abs(T - g.horizon) > 1e-12 * T:
        raise InvalidArgumentError(f"T={T} does not match the boundary horizon {g.horizon}")
    k0g = extension_signal(es, g)
    lam = es.eigenvalues
    eps = _eps_schedule(T, lam[-1])
    times = np.concatenate([[T], T - eps])
    y = duhamel_solve(es, None, k0g, times).coeffs
    z = -lam * y[0]
    z_eps = -lam * np.exp(-np.outer(eps, lam)) * y[1:]
    gap = np.linalg.norm(z_eps - z, axis=1)
    sup_k0 = np.max(np.abs(k0g.values), axis=1)
    bound = eps * np.linalg.norm(lam * sup_k0)
    trace = EpsTrace(eps, gap, bound, 1.0 / lam[-1])
    return BoundaryYield(SpectralVector(z, es), trace)


def inhom_forward_solve(es, u0, f, g, out_grid, backend=None):
    """Forward solve with Dirichlet data g; ``f`` and ``g`` may be None."""
    if g is None or (es.domain_kind != "interval" and g.is_zero()):
        return duhamel_solve(es, u0, f, out_grid, backend=backend)
    if f is not None and abs(f.horizon - g.horizon) > 1e-12 * g.horizon:
        raise InvalidArgumentError("f and g must share the horizon T")
    base = duhamel_solve(es, u0, f if f is not None else ModalSignal.zeros(es, g.horizon),
                         out_grid, backend=backend)
    lift = duhamel_solve(es, None, _boundary_forcing(es, g), out_grid, backend=backend)
    return base + lift


def _l2_sq(a, b, dt):
    # exact int of |linear|^2 over each segment, summed
    return float(np.sum(np.abs(a) ** 2 + np.real(a * np.conj(b)) + np.abs(b) ** 2) * dt / 3.0)


def boundary_norm(g):
    """Discrete surrogate for the H^{1/2}-in-time boundary norm.

    Sum over the two endpoints of ||g||^2 + ||g'|| ||g||, all in L2(0, T).
    """
    total = 0.0
    for v in (g.left, g.right):
        g2 = _l2_sq(v[:-1], v[1:], g.dt)
        d2 = float(np.sum(np.abs(np.diff(v)) ** 2) / g.dt)
        total += g2 + math.sqrt(d2 * g2)
    return math.sqrt(total)

