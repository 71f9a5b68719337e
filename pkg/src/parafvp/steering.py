"""Explicit controls f with y_f = v.

Mode j is driven by beta_j(t) = k_j exp(t(sqrt(lam_j) - lam_j)) on
[theta_j T, T] and is zero before. The amplitudes k_j make
int_0^T beta_j(s) e^{s lam_j} ds = v_j e^{T lam_j} hold exactly.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exprel, logsumexp

from .eigenbasis import SpectralVector
from .errors import InvalidArgumentError, OverflowDomainError
from .forward import ModalSignal, _as_vector, yield_map
from .semigroup import LOG_CAP, log_abs, log_amplification

THRESHOLD = 3.0


def steering_bound_constant(T):
    """C = e^{6T}/T^2 in int|beta_j|^2 <= C lam_j |v_j|^2 (lam_j > 3)."""
    return math.exp(6.0 * T) / T**2


@dataclass(frozen=True, eq=False)
class SteeringControl:
    T: float
    theta: np.ndarray
    k: np.ndarray
    rate: np.ndarray
    basis: object

    @property
    def support_start(self):
        return self.theta * self.T

    def at(self, t):
        """beta(t) as an array of shape (len(t), n_modes)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
        on = t >= self.support_start
        # exponent only evaluated where the control is active
        expo = np.where(on, t * self.rate, 0.0)
        return np.where(on, self.k * np.exp(expo), 0.0)

    def moments(self):
        """e^{-T lam} int_0^T beta_j(s) e^{s lam_j} ds, i.e. the exact yield."""
        lam = self.basis.eigenvalues
        s = np.sqrt(lam)
        d = (1.0 - self.theta) * self.T
        # e^{-T lam} (e^{T s} - e^{theta T s}) / s
        factor = np.exp(self.T * (s - lam)) * -np.expm1(-d * s) / s
        return self.k * factor

    def log_energy(self):
        """log int_0^T |beta_j|^2 dt per mode (-inf where k_j = 0)."""
        a = self.theta * self.T
        d = (1.0 - self.theta) * self.T
        r2 = 2.0 * self.rate
        return 2.0 * log_abs(self.k) + r2 * a + np.log(d * exprel(r2 * d))

    def to_modal_signal(self, M, preserve_yield=False):
        """Piecewise-linear resampling on M segments.

        Returns ``(signal, resampling_error)`` with the relative yield error
        of the raw samples. With ``preserve_yield`` each mode is rescaled so
        the resampled signal's exact yield equals the analytic one.
        """
        times = np.linspace(0.0, self.T, M + 1)
        sig = ModalSignal(self.T, self.at(times).T, self.basis)
        target = self.moments()
        got = yield_map(self.basis, sig).coeffs
        ref = np.linalg.norm(target)
        err = float(np.linalg.norm(got - target) / ref) if ref > 0 else 0.0
        if preserve_yield:
            scale = np.ones(self.basis.n_modes, dtype=complex)
            nz = got != 0
            scale[nz] = target[nz] / got[nz]
            sig = sig.scaled_modes(scale)
        return sig, err


def steer(es, v, T, T0=None, log_cap=LOG_CAP):
    """Control steering 0 to v in time T; T0 (default T/2) sets the low-mode start."""
    v = _as_vector(es, v)
    T = float(T)
    if not T > 0:
        raise InvalidArgumentError("T must be positive")
    T0 = 0.5 * T if T0 is None else float(T0)
    if not 0 <= T0 < T:
        raise InvalidArgumentError("T0 must lie in [0, T)")
    lam = es.eigenvalues
    amp = log_amplification(v, T)
    bad = np.flatnonzero(amp > log_cap)
    if bad.size:
        worst = bad[np.argmax(amp[bad])]
        raise OverflowDomainError(worst + 1, amp[worst], log_cap)
    s = np.sqrt(lam)
    high = lam > THRESHOLD
    theta = np.full(lam.size, T0 / T)
    theta[high] = 1.0 - 1.0 / (lam[high] - s[high])
    d = (1.0 - theta) * T
    # k = v e^{T lam} s / (e^{T s} - e^{theta T s}); zero targets stay exactly zero
    with np.errstate(over="ignore"):
        k = v.coeffs * s * np.exp(T * (lam - s)) / -np.expm1(-d * s)
    k[v.coeffs == 0] = 0.0
    return SteeringControl(T, theta, k, s - lam, es)


@dataclass(frozen=True)
class SteeringCheck:
    residual: float
    control_vstar_norm: float
    bound_ratios: np.ndarray
    high_modes: np.ndarray
    norm_bound: float

    @property
    def max_bound_ratio(self):
        r = self.bound_ratios[self.high_modes]
        r = r[np.isfinite(r)]
        return float(np.max(r)) if r.size else 0.0


def verify_steering(es, control, v, T=None):
    """Exact residual |y_f - v|/|v|, ||f||_{L2(V*)} and the energy bound ratios.

    bound_ratios[j] = int|beta_j|^2 / (C lam_j |v_j|^2), C = e^{6T}/T^2;
    nan where v_j = 0.
    """
    v = _as_vector(es, v)
    es.check_same(control.basis)
    T = control.T if T is None else float(T)
    lam = es.eigenvalues
    y = control.moments()
    vn = v.norm()
    resid = float(np.linalg.norm(y - v.coeffs) / vn) if vn > 0 else float(np.linalg.norm(y))
    log_e = control.log_energy()
    log_norm2 = logsumexp(log_e - np.log(lam)) if np.any(log_e > -np.inf) else -np.inf
    norm = math.exp(0.5 * log_norm2) if log_norm2 < 1400 else math.inf
    log_c = 6.0 * T - 2.0 * math.log(T)
    log_a2 = 2.0 * log_abs(v.coeffs)
    ratios = np.full(lam.size, np.nan)
    nz = v.coeffs != 0
    ratios[nz] = np.exp(log_e[nz] - log_c - np.log(lam[nz]) - log_a2[nz])
    high = lam > THRESHOLD
    # sum over modes of the per-mode energy, capped by C lam |v|^2 / lam for high modes
    low_terms = np.where(high | ~nz, -np.inf, log_e - np.log(lam))
    high_terms = np.where(high & nz, log_c + log_a2, -np.inf)
    log_b = logsumexp(np.concatenate([low_terms, high_terms, [-np.inf]]))
    bound = math.exp(0.5 * log_b) if log_b < 1400 else math.inf
    return SteeringCheck(resid, norm, ratios, high, bound)
