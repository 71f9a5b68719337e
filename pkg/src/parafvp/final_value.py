"""Final value problems: compatibility, reconstruction of u(0), backward solve.

Data (f, u_T, g) are compatible when u_T - y_f + z_g lies in D(e^{TA}).
Then u(0) = e^{TA}(u_T - y_f + z_g) and the forward solve from u(0) hits u_T.
"""
import math
from dataclasses import dataclass

import numpy as np

from .boundary import boundary_norm, boundary_yield, inhom_forward_solve
from .eigenbasis import SpectralVector
from .errors import IncompatibleDataError, InvalidArgumentError
from .forward import (
    ModalSignal,
    _as_vector,
    x_norm,
    x_norm_constant,
    yield_bound_constant,
    yield_map,
)
from .semigroup import (
    LOG_CAP,
    TAIL_TOL,
    log_amplification,
    membership_diagnostic,
    propagate_inverse,
)


def compatibility_vector(u_T, y_f, z_g=None):
    """u_T - y_f + z_g (z_g = 0 when absent)."""
    out = u_T - y_f
    return out if z_g is None else out + z_g


@dataclass(frozen=True)
class CompatibilityReport:
    verdict: str
    compat_vector: SpectralVector
    diagnostic: object
    reconstructed_u0: object
    y_graph_norm: float
    worst_mode: int
    worst_log_amplification: float
    log_conditioning: float
    T: float
    u_T: SpectralVector
    y_f: SpectralVector
    z_g: SpectralVector
    f_vstar_norm: float
    g_norm: float

    @property
    def compatible(self):
        return self.verdict == "compatible"

    @property
    def conditioning(self):
        """e^{T lambda_N}, inf when not representable."""
        return math.exp(self.log_conditioning) if self.log_conditioning < 700 else math.inf


def _horizon(f, g, T):
    horizons = [s.horizon for s in (f, g) if s is not None]
    if T is None:
        if not horizons:
            raise InvalidArgumentError("T is required when neither f nor g is given")
        T = horizons[0]
    T = float(T)
    if not T > 0:
        raise InvalidArgumentError("T must be positive")
    for h in horizons:
        if abs(h - T) > 1e-12 * T:
            raise InvalidArgumentError(f"T={T} does not match a signal horizon {h}")
    return T


def analyze(es, u_T, f=None, g=None, T=None, log_cap=LOG_CAP, tail_tol=TAIL_TOL):
    """Decide compatibility and, when it holds, reconstruct u(0).

    The verdict is "compatible" exactly when every mode of the compat vector
    stays within ``log_cap`` after amplification by e^{T lambda_j}; the
    truncation-tail diagnostic is attached for inspection. Incompatibility is
    a verdict, never an exception.
    """
    T = _horizon(f, g, T)
    u_T = _as_vector(es, u_T)
    y_f = SpectralVector.zeros(es) if f is None else yield_map(es, f)
    z_g = boundary_yield(es, g, T).z_g if g is not None else SpectralVector.zeros(es)
    w = compatibility_vector(u_T, y_f, z_g)
    diag = membership_diagnostic(w, T, tail_tol, log_cap) if es.n_modes >= 8 else None
    amp = log_amplification(w, T)
    worst = int(np.argmax(amp)) + 1 if np.any(amp > -np.inf) else 0
    worst_amp = float(amp[worst - 1]) if worst else -math.inf
    f_norm = 0.0 if f is None else f.vstar_norm()
    g_norm = 0.0 if g is None else boundary_norm(g)
    base = u_T.norm() ** 2 + f_norm**2 + g_norm**2
    if worst_amp > log_cap:
        verdict, u0, extra = "incompatible", None, math.inf
    else:
        verdict = "compatible"
        u0 = propagate_inverse(w, T, log_cap)
        extra = u0.norm() ** 2
    return CompatibilityReport(
        verdict=verdict,
        compat_vector=w,
        diagnostic=diag,
        reconstructed_u0=u0,
        y_graph_norm=math.sqrt(base + extra),
        worst_mode=worst,
        worst_log_amplification=worst_amp,
        log_conditioning=T * float(es.eigenvalues[-1]),
        T=T,
        u_T=u_T,
        y_f=y_f,
        z_g=z_g,
        f_vstar_norm=f_norm,
        g_norm=g_norm,
    )


def solve_fvp(es, u_T, f=None, g=None, T=None, out_grid=None, log_cap=LOG_CAP,
              tail_tol=TAIL_TOL, report=None, backend=None):
    """Backward-forward solution on ``out_grid`` (default: 0 and T).

    Raises IncompatibleDataError, carrying the report, for incompatible data.
    """
    if report is None:
        report = analyze(es, u_T, f, g, T, log_cap, tail_tol)
    if not report.compatible:
        raise IncompatibleDataError(report)
    T = report.T
    out = np.array([0.0, T]) if out_grid is None else out_grid
    if f is None:
        f = ModalSignal.zeros(es, T)
    return inhom_forward_solve(es, report.reconstructed_u0, f, g, out, backend=backend)


@dataclass(frozen=True)
class NormCheck:
    lhs: float
    rhs: float
    constant: float

    @property
    def ratio(self):
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    @property
    def passed(self):
        return self.ratio <= 1.0 + 1e-8


def equivalent_norm_constant(es, T):
    """C with |u_T| <= C (||f|| + |e^{TA}(u_T - y_f)|) in the truncated model."""
    return max(yield_bound_constant(es, T), math.exp(-float(es.eigenvalues[0]) * T))


def equivalent_norm_check(reports):
    """Per-report checks of |u_T| <= C(||f|| + |e^{TA}(u_T - y_f)|).

    Reports with boundary data are checked on u_T + z_g, the part steered by
    f and u(0).
    """
    checks = []
    for rep in reports:
        if not rep.compatible:
            raise InvalidArgumentError("equivalent_norm_check needs compatible reports")
        C = equivalent_norm_constant(rep.u_T.basis, rep.T)
        lhs = (rep.u_T + rep.z_g).norm()
        rhs = C * (rep.f_vstar_norm + rep.reconstructed_u0.norm())
        checks.append(NormCheck(lhs, rhs, C))
    return checks


def well_posedness_check(es, report, traj, f=None):
    """||u||_X <= c ||(f, u_T)||_Y on a compatible homogeneous-boundary instance.

    c = sqrt(6 + T/lambda_1), the constant of the forward estimate, since
    |u0|^2 + ||f||^2 is part of the squared Y graph norm.
    """
    c = math.sqrt(x_norm_constant(es, report.T))
    return NormCheck(x_norm(traj, f), c * report.y_graph_norm, c)
