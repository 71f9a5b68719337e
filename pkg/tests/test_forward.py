import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _oracles import rk4_modal
from parafvp import kernels
from parafvp.eigenbasis import SpectralVector, interval_basis
from parafvp.errors import InvalidArgumentError
from parafvp.forward import (
    ModalSignal,
    duhamel_solve,
    segment_weights,
    smoothing_constant,
    smoothing_inequality_check,
    stability_check,
    x_norm,
    x_norm_parts,
    yield_bound_constant,
    yield_map,
)

BACKENDS = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])

E_M1 = 0.367879441171442321595523770161
ONE_MINUS_E_M1 = 0.632120558828557678404476229839


@pytest.fixture(scope="module")
def unit_interval_pi():
    return interval_basis(math.pi, 1, 16)


def random_signal(es, rng, T=1.0, M=20, scale=1.0):
    vals = rng.normal(size=(es.n_modes, M + 1)) + 1j * rng.normal(size=(es.n_modes, M + 1))
    return ModalSignal(T, scale * vals, es)


@pytest.mark.parametrize("z", [1e-9, 1e-5, 1e-3, 0.05, 0.0999, 0.1, 0.5, 3.0, 40.0, 800.0])
def test_segment_weights_against_quadrature(z):
    import mpmath

    mpmath.mp.dps = 40
    lam, delta = z, 1.0
    decay, wl, wr = segment_weights(lam, delta)
    lm = mpmath.mpf(lam)
    left = float(mpmath.quad(lambda s: mpmath.exp(-lm * (1 - s)) * (1 - s), [0, 1]))
    right = float(mpmath.quad(lambda s: mpmath.exp(-lm * (1 - s)) * s, [0, 1]))
    assert decay == pytest.approx(math.exp(-z), rel=1e-15)
    assert wl == pytest.approx(left, rel=1e-12)
    assert wr == pytest.approx(right, rel=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_pure_decay(unit_interval_pi, backend):
    f = ModalSignal.zeros(unit_interval_pi, 1.0, 4)
    traj = duhamel_solve(unit_interval_pi, [1.0], f, [1.0], backend=backend)
    assert traj.coeffs[0, 0].real == pytest.approx(E_M1, rel=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_relaxation_constant_source(unit_interval_pi, backend):
    f = ModalSignal.constant(unit_interval_pi, 1.0, [1.0], M=7)
    traj = duhamel_solve(unit_interval_pi, None, f, [1.0], backend=backend)
    assert traj.coeffs[0, 0].real == pytest.approx(ONE_MINUS_E_M1, rel=1e-14)


def test_backends_agree(pi16, rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    u0 = rng.normal(size=16)
    f = random_signal(pi16, rng, M=50)
    out = np.linspace(0, 1, 37)
    a = duhamel_solve(pi16, u0, f, out, backend="python").coeffs
    b = duhamel_solve(pi16, u0, f, out, backend="cython").coeffs
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-300)


def test_against_rk4_oracle(pi16, rng):
    # 50 instances, stacked so the oracle runs once
    n_inst, M, T = 50, 20, 1.0
    lam = pi16.eigenvalues
    u0 = rng.normal(size=(n_inst, 16)) + 1j * rng.normal(size=(n_inst, 16))
    vals = rng.normal(size=(n_inst, 16, M + 1))
    t_nodes = np.linspace(0, T, M + 1)

    def source(t):
        m = min(int(t / (T / M)), M - 1)
        frac = (t - t_nodes[m]) / (T / M)
        return (1 - frac) * vals[:, :, m] + frac * vals[:, :, m + 1]

    oracle = rk4_modal(lam, u0, source, T, 1e-4)
    for i in range(n_inst):
        got = duhamel_solve(pi16, u0[i], ModalSignal(T, vals[i], pi16), [T]).coeffs[0]
        assert np.linalg.norm(got - oracle[i]) <= 1e-8 * np.linalg.norm(oracle[i])


def test_out_grid_bounds(pi16):
    f = ModalSignal.zeros(pi16, 1.0)
    with pytest.raises(InvalidArgumentError):
        duhamel_solve(pi16, None, f, [1.5])
    with pytest.raises(InvalidArgumentError):
        duhamel_solve(pi16, None, f, [-0.1])


def test_initial_state_is_kept(pi16, rng):
    u0 = rng.normal(size=16)
    traj = duhamel_solve(pi16, u0, random_signal(pi16, rng), [0.0, 0.5])
    np.testing.assert_array_equal(traj.coeffs[0], u0)


def test_flow_property(pi16, rng):
    M, T = 40, 1.0
    f = random_signal(pi16, rng, T=T, M=M)
    u0 = rng.normal(size=16)
    node = 12
    t1 = node * T / M
    out = np.linspace(t1, T, 9)
    full = duhamel_solve(pi16, u0, f, out).coeffs
    mid = duhamel_solve(pi16, u0, f, [t1]).final
    restarted = duhamel_solve(pi16, mid, f.shifted(node), out - t1).coeffs
    assert np.all(np.abs(restarted - full) <= 1e-12 * np.abs(full) + 1e-300)


def test_linearity(pi16, rng):
    out = np.linspace(0, 1, 11)
    u_a, u_b = rng.normal(size=16), rng.normal(size=16)
    f_a, f_b = random_signal(pi16, rng), random_signal(pi16, rng)
    sum_sol = duhamel_solve(pi16, u_a + u_b, f_a + f_b, out).coeffs
    parts = duhamel_solve(pi16, u_a, f_a, out).coeffs + duhamel_solve(pi16, u_b, f_b, out).coeffs
    assert np.linalg.norm(sum_sol - parts) <= 1e-13 * np.linalg.norm(sum_sol)


def test_yield_map_examples(pi16):
    f = ModalSignal.constant(pi16, 1.0, np.eye(16)[0], M=3)
    y = yield_map(pi16, f).coeffs
    assert y[0].real == pytest.approx(ONE_MINUS_E_M1, rel=1e-14)
    assert np.all(y[1:] == 0)
    assert np.all(yield_map(pi16, ModalSignal.zeros(pi16, 1.0)).coeffs == 0)


def test_yield_bound(pi16, rng):
    c = yield_bound_constant(pi16, 1.0)
    assert c <= 1 / math.sqrt(2) * (1 + 1e-15)
    for _ in range(50):
        f = random_signal(pi16, rng, M=30)
        assert yield_map(pi16, f).norm() <= c * f.vstar_norm() * (1 + 1e-12)


def test_vstar_norm_against_fine_quadrature(pi16, rng):
    f = random_signal(pi16, rng, M=10)
    t = np.linspace(0, 1, 20001)
    vals = f.at(t)
    dense = np.trapezoid(np.sum(np.abs(vals) ** 2 / pi16.eigenvalues, axis=1), t)
    assert f.vstar_norm() ** 2 == pytest.approx(dense, rel=1e-6)


def test_x_norm_examples(unit_interval_pi):
    zero = duhamel_solve(unit_interval_pi, None, None, np.linspace(0, 1, 65))
    assert x_norm(zero) == 0.0
    traj = duhamel_solve(unit_interval_pi, [1.0], None, np.linspace(0, 1, 65))
    parts = x_norm_parts(traj)
    assert parts["l2_v"] == pytest.approx(0.432332358381693654053000252514, rel=1e-7)
    assert parts["sup_h"] == 1.0


def test_x_norm_converges_under_doubling(pi16, rng):
    u0 = rng.normal(size=16) * np.exp(-0.5 * pi16.eigenvalues)
    f = ModalSignal.from_function(pi16, 1.0, 8, lambda t: np.cos(t) / np.arange(1, 17))
    a = x_norm(duhamel_solve(pi16, u0, f, np.linspace(0, 1, 65)), f)
    b = x_norm(duhamel_solve(pi16, u0, f, np.linspace(0, 1, 129)), f)
    assert abs(a - b) <= 1e-6 * b


def test_stability_examples(pi16):
    out = np.linspace(0, 1, 257)
    e1 = np.eye(16)[0]
    rep = stability_check(pi16, e1, None, duhamel_solve(pi16, e1, None, out))
    assert rep.sup_lhs == pytest.approx(1.0) and rep.passed
    f = ModalSignal.constant(pi16, 1.0, e1, M=4)
    rep = stability_check(pi16, None, f, duhamel_solve(pi16, None, f, out))
    assert rep.sup_lhs == pytest.approx(0.39957640089372804870295195465, rel=1e-12)
    assert rep.rhs == pytest.approx(1.0, rel=1e-14)


def test_stability_sweep(pi16, rng):
    out = np.linspace(0, 1, 513)
    for _ in range(100):
        u0 = rng.normal(size=16) * rng.uniform(0, 2)
        f = random_signal(pi16, rng, M=16, scale=rng.uniform(0, 5))
        rep = stability_check(pi16, u0, f, duhamel_solve(pi16, u0, f, out))
        assert rep.passed, rep


def test_smoothing_examples():
    es = interval_basis(math.pi, 16, 64)
    rep = smoothing_inequality_check(es, np.eye(16)[0], 1.0)
    # (1-t)e^{-2t} is decreasing on [0,1]: maximum 1 at t = 0
    assert rep.lhs == pytest.approx(1.0, rel=1e-12)
    assert rep.c5 == pytest.approx(3.0)
    assert rep.rhs == pytest.approx(3 * 0.432332358381693654053000252514, rel=1e-12)
    assert rep.ratio < 1
    stiff = smoothing_inequality_check(es, np.eye(16)[-1], 1.0)
    assert stiff.ratio < 1
    scaled = smoothing_inequality_check(es, 1e3 * np.eye(16)[0], 1.0)
    assert scaled.ratio == pytest.approx(rep.ratio, rel=1e-12)


def test_smoothing_supremum_sits_at_zero(rng):
    # every term (T-t) e^{-2 lam t} is decreasing, so the supremum is T |u0|^2
    es = interval_basis(1.7, 8, 64)
    for T in (0.1, 1.0, 4.0):
        u0 = rng.normal(size=8)
        rep = smoothing_inequality_check(es, u0, T)
        assert rep.argmax_t == 0.0
        assert rep.lhs == pytest.approx(T * np.sum(u0**2), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.3, 30.0), st.floats(0.05, 5.0), st.integers(0, 2**32 - 1))
def test_smoothing_sweep(length, T, seed):
    es = interval_basis(length, 8, 64)
    u0 = np.random.default_rng(seed).normal(size=8)
    rep = smoothing_inequality_check(es, u0, T)
    assert rep.ratio <= 1 + 1e-8
    assert rep.c5 >= smoothing_constant(es, T) - 1e-15


def test_smoothing_rejects_zero(pi16):
    with pytest.raises(InvalidArgumentError):
        smoothing_inequality_check(pi16, SpectralVector.zeros(pi16), 1.0)
