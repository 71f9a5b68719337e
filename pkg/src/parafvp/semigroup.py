"""The semigroup e^{-tA}, its unbounded inverse e^{tA}, and domain membership.

Everything is diagonal in the eigenbasis. Growth factors are handled in log
space: a coefficient survives ``propagate_inverse`` only when
``log|c_j| + t*lambda_j <= log_cap``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .eigenbasis import SpectralVector
from .errors import InvalidArgumentError, OverflowDomainError

LOG_CAP = 300.0
TAIL_TOL = 1e-6
# partial sums growing by this factor over the last doubling => divergent
DIVERGENCE_FACTOR = 10.0


def _check_time(t):
    if not t >= 0:
        raise InvalidArgumentError(f"t must be nonnegative, got {t!r}")


def log_abs(coeffs):
    """log|c| with -inf for exact zeros (no warnings)."""
    a = np.abs(coeffs)
    out = np.full(a.shape, -np.inf)
    np.log(a, out=out, where=a > 0)
    return out


def log_amplification(v, t):
    """Per-mode log|c_j| + t*lambda_j."""
    return log_abs(v.coeffs) + t * v.basis.eigenvalues


def propagate(v, t):
    """e^{-tA} v."""
    _check_time(t)
    return SpectralVector(np.exp(-t * v.basis.eigenvalues) * v.coeffs, v.basis)


def propagate_inverse(v, t, log_cap=LOG_CAP):
    """e^{tA} v, refusing any mode whose log-amplification exceeds ``log_cap``."""
    _check_time(t)
    amp = log_amplification(v, t)
    bad = np.flatnonzero(amp > log_cap)
    if bad.size:
        worst = bad[np.argmax(amp[bad])]
        raise OverflowDomainError(worst + 1, amp[worst], log_cap)
    # exact zeros stay zero even where e^{t lambda} itself overflows
    live = v.coeffs != 0
    out = np.zeros_like(v.coeffs)
    out[live] = np.exp(t * v.basis.eigenvalues[live]) * v.coeffs[live]
    return SpectralVector(out, v.basis)


def _log_graph_terms(v, t):
    # log of (1 + e^{2 lambda t}) |c|^2
    lam = v.basis.eigenvalues
    return np.logaddexp(0.0, 2.0 * t * lam) + 2.0 * log_abs(v.coeffs)


def _logsumexp(x):
    x = np.asarray(x, dtype=float)
    if x.size == 0 or np.all(x == -np.inf):
        return -np.inf
    top = np.max(x)
    return float(top + np.log(np.sum(np.exp(x - top))))


def graph_norm(v, t, log_cap=LOG_CAP):
    """Graph norm of D(e^{tA}); ``inf`` once any term passes ``log_cap``."""
    _check_time(t)
    if np.any(log_amplification(v, t) > log_cap):
        return math.inf
    log_s = _logsumexp(_log_graph_terms(v, t))
    return 0.0 if log_s == -np.inf else math.exp(0.5 * log_s)


@dataclass(frozen=True)
class MembershipDiagnostic:
    verdict: str
    per_mode_log_amplification: np.ndarray
    schedule: tuple
    partial_graph_norms: tuple
    tail_ratio: float
    log_cap: float
    tail_tol: float

    @property
    def worst_mode(self):
        """1-based mode with the largest log-amplification (0 if v = 0)."""
        amp = self.per_mode_log_amplification
        if np.all(amp == -np.inf):
            return 0
        return int(np.argmax(amp)) + 1

    @property
    def max_log_amplification(self):
        return float(np.max(self.per_mode_log_amplification))


def doubling_schedule(n):
    sched = [n]
    while sched[-1] > 1:
        sched.append(sched[-1] // 2)
    return tuple(reversed(sched))


def membership_diagnostic(v, t, tail_tol=TAIL_TOL, log_cap=LOG_CAP):
    """Finite-truncation test of ``v in D(e^{tA})``.

    Partial sums S_N of the squared graph norm are taken for N = ..., n/2, n.
    compatible: last-doubling growth ``S_n/S_{n/2} - 1 <= tail_tol`` and no
    mode above ``log_cap``; incompatible: growth by a decade or more over the
    last doubling, or a mode above the cap; otherwise indeterminate.
    """
    _check_time(t)
    n = v.basis.n_modes
    if n < 8:
        raise InvalidArgumentError("membership_diagnostic needs n_modes >= 8")
    amp = log_amplification(v, t)
    terms = _log_graph_terms(v, t)
    sched = doubling_schedule(n)
    log_s = [_logsumexp(terms[:N]) for N in sched]
    norms = tuple(math.exp(0.5 * s) if s < 1400 else math.inf for s in log_s)
    hi, lo = log_s[-1], log_s[-2]
    if hi == -np.inf:
        tail = 0.0
    elif lo == -np.inf:
        tail = math.inf
    else:
        tail = math.expm1(hi - lo)
    capped = bool(np.any(amp > log_cap))
    if capped or tail + 1.0 >= DIVERGENCE_FACTOR:
        verdict = "incompatible"
    elif tail <= tail_tol:
        verdict = "compatible"
    else:
        verdict = "indeterminate"
    return MembershipDiagnostic(
        verdict=verdict,
        per_mode_log_amplification=amp,
        schedule=sched,
        partial_graph_norms=norms,
        tail_ratio=tail,
        log_cap=log_cap,
        tail_tol=tail_tol,
    )


def witness_modes(es, n_terms):
    """Strictly increasing 0-based indices j_n with lambda_{j_n} >= n."""
    lam = es.eigenvalues
    picks = []
    j = -1
    for n in range(1, n_terms + 1):
        j += 1
        while j < lam.size and lam[j] < n:
            j += 1
        if j >= lam.size:
            raise InvalidArgumentError(
                f"n_terms={n_terms} exceeds the modes available in the truncation")
        picks.append(j)
    return np.array(picks, dtype=int)


def domain_chain_witness(es, t, n_terms):
    """Truncation of x = sum_n (1/n) e^{-lambda_{j_n} t} e_{j_n}.

    x lies in D(e^{tA}) but not in D(e^{t'A}) for any t' > t.
    """
    _check_time(t)
    if n_terms < 1:
        raise InvalidArgumentError("n_terms must be at least 1")
    idx = witness_modes(es, int(n_terms))
    n = np.arange(1, idx.size + 1)
    c = np.zeros(es.n_modes, dtype=complex)
    c[idx] = np.exp(-t * es.eigenvalues[idx]) / n
    return SpectralVector(c, es)
