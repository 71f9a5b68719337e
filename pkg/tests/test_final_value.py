import math

import numpy as np
import pytest

from parafvp.boundary import BoundarySignal, boundary_yield, inhom_forward_solve
from parafvp.eigenbasis import SpectralVector, interval_basis
from parafvp.errors import BasisMismatchError, IncompatibleDataError
from parafvp.final_value import (
    analyze,
    compatibility_vector,
    equivalent_norm_check,
    equivalent_norm_constant,
    solve_fvp,
    well_posedness_check,
)
from parafvp.forward import ModalSignal, duhamel_solve, yield_bound_constant, yield_map
from parafvp.semigroup import propagate

E_M9 = 0.00012340980408667954949763669073


def random_instance(es, rng, T):
    u0 = SpectralVector(rng.normal(size=es.n_modes) + 1j * rng.normal(size=es.n_modes), es)
    f = ModalSignal(T, rng.normal(size=(es.n_modes, 9)), es)
    return u0, f


def test_compatibility_vector_examples(pi16, rng):
    y = SpectralVector(rng.normal(size=16), pi16)
    assert np.all(compatibility_vector(y, y).coeffs == 0)
    u0 = SpectralVector(rng.normal(size=16), pi16)
    w = compatibility_vector(propagate(u0, 1.0) + y, y)
    np.testing.assert_allclose(w.coeffs, propagate(u0, 1.0).coeffs, atol=1e-15)
    z = SpectralVector(rng.normal(size=16), pi16)
    assert np.all(compatibility_vector(-z, SpectralVector.zeros(pi16), z).coeffs == 0)


def test_compatibility_vector_basis_mismatch(pi16):
    other = interval_basis(2.0, 16, 256)
    with pytest.raises(BasisMismatchError):
        compatibility_vector(SpectralVector.zeros(pi16), SpectralVector.zeros(other))


def test_analyze_single_mode(pi16):
    rep = analyze(pi16, SpectralVector.unit(pi16, 3, E_M9), T=1.0)
    assert rep.compatible
    expected = np.zeros(16)
    expected[2] = 1.0
    assert np.linalg.norm(rep.reconstructed_u0.coeffs - expected) <= 1e-12
    assert rep.log_conditioning == pytest.approx(256.0)


def test_analyze_top_mode_incompatible():
    es = interval_basis(math.pi, 20, 80)
    rep = analyze(es, SpectralVector.unit(es, 20), T=1.0)
    assert rep.verdict == "incompatible" and not rep.compatible
    assert rep.worst_mode == 20
    assert rep.worst_log_amplification == pytest.approx(400.0)
    assert rep.reconstructed_u0 is None and rep.y_graph_norm == math.inf


def test_analyze_pure_yield_gives_zero(pi16, rng):
    f = ModalSignal(1.0, rng.normal(size=(16, 5)), pi16)
    rep = analyze(pi16, yield_map(pi16, f), f)
    assert rep.compatible
    assert np.all(rep.reconstructed_u0.coeffs == 0)


def test_reconstruction_invariant(pi16, rng):
    for _ in range(20):
        u0, f = random_instance(pi16, rng, 0.05)
        uT = duhamel_solve(pi16, u0, f, [0.05]).final
        rep = analyze(pi16, uT, f)
        back = propagate(rep.reconstructed_u0, rep.T)
        assert (back - rep.compat_vector).norm() <= 1e-10 * rep.compat_vector.norm()


def test_solve_fvp_roundtrip(pi16, rng):
    T = 20.0 / pi16.eigenvalues[-1]
    for _ in range(20):
        u0, f = random_instance(pi16, rng, T)
        uT = duhamel_solve(pi16, u0, f, [T]).final
        traj = solve_fvp(pi16, uT, f, out_grid=[0.0, T / 2, T])
        assert (traj.state(0) - u0).norm() <= 1e-6 * u0.norm()
        assert (traj.final - uT).norm() <= 1e-8 * uT.norm()


def test_solve_fvp_single_mode(pi16):
    uT = SpectralVector.unit(pi16, 1, math.exp(-1.0))
    traj = solve_fvp(pi16, uT, T=1.0, out_grid=[0.0, 0.5, 1.0])
    np.testing.assert_allclose(traj.coeffs[:, 0].real, np.exp(-np.array([0.0, 0.5, 1.0])),
                               rtol=1e-14)
    assert np.all(traj.coeffs[:, 1:] == 0)


def test_solve_fvp_boundary_only(pi16):
    g = BoundarySignal.constant(1.0, 1.0, -0.5, M=4)
    z = boundary_yield(pi16, g).z_g
    out = np.linspace(0, 1, 9)
    traj = solve_fvp(pi16, -z, g=g, out_grid=out)
    ref = inhom_forward_solve(pi16, None, None, g, out)
    assert np.max(np.abs(traj.coeffs - ref.coeffs)) <= 1e-12 * np.max(np.abs(ref.coeffs))


def test_solve_fvp_with_boundary_roundtrip(pi16, rng):
    T = 0.05
    for _ in range(10):
        u0, f = random_instance(pi16, rng, T)
        g = BoundarySignal(T, rng.normal(size=5), rng.normal(size=5))
        uT = inhom_forward_solve(pi16, u0, f, g, [T]).final
        rep = analyze(pi16, uT, f, g)
        assert rep.compatible
        assert (rep.reconstructed_u0 - u0).norm() <= 1e-8 * u0.norm()
        traj = solve_fvp(pi16, uT, f, g, report=rep, out_grid=[0.0, T])
        assert (traj.final - uT).norm() <= 1e-10 * uT.norm()


def test_solve_fvp_refuses_incompatible():
    es = interval_basis(math.pi, 20, 80)
    with pytest.raises(IncompatibleDataError) as err:
        solve_fvp(es, SpectralVector.unit(es, 20), T=1.0)
    assert err.value.report.worst_mode == 20


def test_equivalent_norm_examples(pi16, rng):
    f = ModalSignal(1.0, rng.normal(size=(16, 5)), pi16)
    (chk,) = equivalent_norm_check([analyze(pi16, yield_map(pi16, f), f)])
    c = yield_bound_constant(pi16, 1.0)
    assert chk.lhs <= c * f.vstar_norm() * (1 + 1e-12)
    assert chk.passed
    uT = propagate(SpectralVector(rng.normal(size=16), pi16), 1.0)
    (chk,) = equivalent_norm_check([analyze(pi16, uT, T=1.0)])
    assert chk.lhs <= math.exp(-1.0) * analyze(pi16, uT, T=1.0).reconstructed_u0.norm() * (1 + 1e-12)
    assert chk.ratio <= math.exp(-1.0) / equivalent_norm_constant(pi16, 1.0) * (1 + 1e-12)


def test_equivalent_norm_sweep(pi16, rng):
    reports = []
    for _ in range(100):
        T = rng.uniform(0.01, 1.0)
        u0, f = random_instance(pi16, rng, T)
        u0 = SpectralVector(u0.coeffs * np.exp(-rng.uniform(0, 1) * pi16.eigenvalues), pi16)
        uT = duhamel_solve(pi16, u0, f, [T]).final
        reports.append(analyze(pi16, uT, f))
    assert all(c.passed for c in equivalent_norm_check(reports))


def test_well_posedness_sweep(pi16, rng):
    for _ in range(50):
        T = rng.uniform(0.01, 0.1)
        u0, f = random_instance(pi16, rng, T)
        out = np.linspace(0, T, 257)
        uT = duhamel_solve(pi16, u0, f, [T]).final
        rep = analyze(pi16, uT, f)
        traj = solve_fvp(pi16, uT, f, report=rep, out_grid=out)
        chk = well_posedness_check(pi16, rep, traj, f)
        assert chk.ratio <= 1 + 1e-8


def test_bijection(pi16, rng):
    T = 0.05
    cond = math.exp(T * pi16.eigenvalues[-1])
    for _ in range(20):
        u0, f = random_instance(pi16, rng, T)
        uT = duhamel_solve(pi16, u0, f, [T]).final
        back = analyze(pi16, uT, f).reconstructed_u0
        assert (back - u0).norm() <= 100 * cond * np.finfo(float).eps * (u0.norm() + uT.norm())
        v = SpectralVector(rng.normal(size=16), pi16)
        rep = analyze(pi16, v, f)
        again = duhamel_solve(pi16, rep.reconstructed_u0, f, [T]).final
        assert (again - v).norm() <= 100 * np.finfo(float).eps * cond * v.norm()


def test_uniqueness(pi16, rng):
    T = 0.05
    u0, f = random_instance(pi16, rng, T)
    uT = duhamel_solve(pi16, u0, f, [T]).final
    out = np.linspace(0, T, 11)
    a = solve_fvp(pi16, uT, f, out_grid=out).coeffs
    b = solve_fvp(pi16, SpectralVector(uT.coeffs.copy(), pi16), f, out_grid=out).coeffs
    assert np.linalg.norm(a - b) <= 1e-10 * np.linalg.norm(a)
