"""Tables quantifying backward instability, Weyl counting and domain shrinkage.

Every amplification is given in log form; linear values are included only
when they stay within the log cap.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .semigroup import LOG_CAP, domain_chain_witness, graph_norm


@dataclass(frozen=True)
class InstabilityRow:
    k: int
    eigenvalue: float
    log_amplification: float
    amplification: float
    flagged: bool


def instability_table(es, T, k_max=None, log_cap=LOG_CAP):
    """Rows (k, lambda_k, T lambda_k, e^{T lambda_k}) for k = 1..k_max."""
    k_max = es.n_modes if k_max is None else int(k_max)
    if not 1 <= k_max <= es.n_modes:
        raise InvalidArgumentError(f"k_max must lie in [1, {es.n_modes}]")
    if not T >= 0:
        raise InvalidArgumentError("T must be nonnegative")
    rows = []
    for j in range(k_max):
        lam = float(es.eigenvalues[j])
        la = T * lam
        flagged = la > log_cap
        rows.append(InstabilityRow(j + 1, lam, la, math.inf if flagged else math.exp(la),
                                   flagged))
    return rows


@dataclass(frozen=True)
class WeylCheck:
    count: int
    predicted: float
    ratio: float


def weyl_check(es, lam_cut):
    """Eigenvalue count N(lam_cut) against the leading Weyl term."""
    if not lam_cut > 0:
        raise InvalidArgumentError("lam_cut must be positive")
    cut = es.complete_cutoff()
    # interval: the cutoff is lambda_N itself; rectangle: the first excluded value
    if lam_cut > cut or (es.domain_kind != "interval" and lam_cut >= cut):
        raise InvalidArgumentError(
            f"lam_cut={lam_cut} is beyond what the truncation counts completely")
    count = int(np.count_nonzero(es.eigenvalues <= lam_cut))
    if es.domain_kind == "interval":
        predicted = es.lengths[0] * math.sqrt(lam_cut) / math.pi
    else:
        predicted = es.lengths[0] * es.lengths[1] * lam_cut / (4.0 * math.pi)
    return WeylCheck(count, predicted, count / predicted)


@dataclass(frozen=True)
class ConditioningRow:
    T: float
    max_recoverable: int
    witness_norm_t: float
    witness_norm_2t: float


def max_recoverable_mode(es, T, log_cap=LOG_CAP):
    """Largest k with T lambda_k <= log_cap (all modes when T = 0)."""
    return int(np.count_nonzero(T * es.eigenvalues <= log_cap))


def backward_conditioning_report(es, T_list, log_cap=LOG_CAP, n_terms=None):
    """Recoverable-mode counts and witness graph norms at t = T and 2T."""
    if n_terms is None:
        n_terms = max(1, min(32, es.n_modes // 2))
    rows = []
    for T in T_list:
        T = float(T)
        if not T >= 0:
            raise InvalidArgumentError("times must be nonnegative")
        w = domain_chain_witness(es, T, n_terms)
        rows.append(ConditioningRow(
            T=T,
            max_recoverable=max_recoverable_mode(es, T, log_cap),
            witness_norm_t=graph_norm(w, T, log_cap),
            witness_norm_2t=graph_norm(w, 2 * T, log_cap),
        ))
    return rows
