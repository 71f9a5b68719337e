"""Finite-dimensional non-selfadjoint models u' + Au = 0 with Re A > 0.

A = X + iY with X, Y Hermitian. m_A is the smallest eigenvalue of X, the
lower bound of the real part of the numerical range.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigvalsh, expm

from .errors import InvalidArgumentError, NotEllipticError

COND_LIMIT = 1e8


def hermitian_part(A):
    return 0.5 * (A + A.conj().T)


def skew_part(A):
    """Y with A = X + iY."""
    return (A - A.conj().T) / 2j


@dataclass(frozen=True, eq=False)
class MatrixModel:
    A: np.ndarray
    m_A: float
    sector_half_angle: float
    analytic_half_angle: float
    hyponormal: bool
    hyponormal_sampled: bool
    accretive_square: bool
    herm_square_min_eig: float
    commutator_min_eig: float
    seed: int
    n_samples: int
    _eig: tuple = field(repr=False, default=None)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def convexity_expected(self):
        return self.hyponormal or self.accretive_square


def _unit_rows(V):
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def build(A, n_samples=10**4, seed=0):
    """Analyse A: ellipticity, sector half-angle, hyponormality, accretive A^2."""
    A = np.array(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidArgumentError("A must be a nonempty square matrix")
    if not np.all(np.isfinite(A)):
        raise InvalidArgumentError("A must have finite entries")
    n = A.shape[0]
    X, Y = hermitian_part(A), skew_part(A)
    m_A = float(eigvalsh(X)[0])
    if m_A <= 0:
        raise NotEllipticError(f"Hermitian part is not positive definite (m_A = {m_A:.6g})")
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=(n_samples, n)) + 1j * rng.normal(size=(n_samples, n))
    w, V = np.linalg.eig(A)
    extra = [np.eye(n), V.T, eigh(X)[1].T, eigh(Y)[1].T]
    vs = _unit_rows(np.vstack([samples] + extra))
    Av = vs @ A.T
    q = np.sum(vs.conj() * Av, axis=1)
    angle = float(np.max(np.arctan2(np.abs(q.imag), q.real)))
    norm_a = np.linalg.norm(A, 2)
    analytic = math.atan(np.linalg.norm(Y, 2) / m_A)
    comm = A.conj().T @ A - A @ A.conj().T
    comm_min = float(eigvalsh(hermitian_part(comm))[0])
    tol = 1e-12 * norm_a**2
    A_star_v = vs @ A.conj()
    hypo_sampled = bool(np.all(np.linalg.norm(A_star_v, axis=1)
                               <= np.linalg.norm(Av, axis=1) * (1 + 1e-12)))
    sq_min = float(eigvalsh(hermitian_part(A @ A))[0])
    cond = np.linalg.cond(V)
    eig = (w, V) if np.isfinite(cond) and cond <= COND_LIMIT else None
    return MatrixModel(
        A=A,
        m_A=m_A,
        sector_half_angle=angle,
        analytic_half_angle=analytic,
        hyponormal=comm_min >= -tol,
        hyponormal_sampled=hypo_sampled,
        accretive_square=sq_min >= -tol,
        herm_square_min_eig=sq_min,
        commutator_min_eig=comm_min,
        seed=seed,
        n_samples=n_samples,
        _eig=eig,
    )


def counterexample(lam=1.0, delta=0.5):
    """A = lam diag(1, 4) + i lam [[delta, 1], [1, 4 delta]]."""
    if not 0 < delta <= 0.5:
        raise InvalidArgumentError("delta must lie in (0, 1/2]")
    X = lam * np.diag([1.0, 4.0])
    Y = lam * np.array([[delta, 1.0], [1.0, 4.0 * delta]])
    return X + 1j * Y


def propagator(model, t):
    """The matrix e^{-tA}."""
    if not t >= 0:
        raise InvalidArgumentError("t must be nonnegative")
    if model._eig is not None:
        w, V = model._eig
        return (V * np.exp(-t * w)) @ np.linalg.inv(V)
    return expm(-t * model.A)


def expm_apply(model, t, v):
    """e^{-tA} v; eigendecomposition when well conditioned, else Pade."""
    if not t >= 0:
        raise InvalidArgumentError("t must be nonnegative")
    v = np.asarray(v, dtype=complex)
    if t == 0:
        return v.copy()
    if model._eig is not None:
        w, V = model._eig
        return V @ (np.exp(-t * w) * np.linalg.solve(V, v))
    return expm(-t * model.A) @ v


def _heights(model, u0, t):
    if model._eig is not None:
        w, V = model._eig
        c = np.linalg.solve(V, u0)
        states = (np.exp(-np.outer(t, w)) * c) @ V.T
    else:
        states = np.array([expm(-s * model.A) @ u0 for s in t])
    return np.linalg.norm(states, axis=1)


@dataclass(frozen=True)
class HeightReport:
    t: np.ndarray
    h: np.ndarray
    first_diff: np.ndarray
    second_diff: np.ndarray
    slope0: float
    re_numerical: float
    m_A: float
    convexity_expected: bool

    @property
    def decreasing(self):
        return bool(np.all(self.first_diff < 0))

    @property
    def convex(self):
        return bool(np.all(self.second_diff > 0))

    @property
    def slope_bound_holds(self):
        return self.slope0 <= -self.m_A + 1e-4

    @property
    def slope_matches(self):
        return abs(self.slope0 + self.re_numerical) <= 1e-4


def height_function(model, u0, t_grid, delta=1e-6):
    """h(t) = |e^{-tA} u0| for unit u0 (normalised here), with companion checks.

    h'(0) is a one-sided difference at step ``delta``, Richardson extrapolated.
    """
    u0 = np.asarray(u0, dtype=complex)
    nrm = np.linalg.norm(u0)
    if nrm == 0:
        raise InvalidArgumentError("u0 must be nonzero")
    u0 = u0 / nrm
    t = np.asarray(t_grid, dtype=float)
    h = _heights(model, u0, t)
    h0, h1, h2 = _heights(model, u0, np.array([0.0, delta / 2, delta]))
    d_half = (h1 - h0) / (delta / 2)
    d_full = (h2 - h0) / delta
    slope0 = 2.0 * d_half - d_full
    re_q = float(np.real(np.vdot(u0, model.A @ u0)))
    return HeightReport(
        t=t,
        h=h,
        first_diff=np.diff(h),
        second_diff=np.diff(h, 2),
        slope0=float(slope0),
        re_numerical=re_q,
        m_A=model.m_A,
        convexity_expected=model.convexity_expected,
    )
