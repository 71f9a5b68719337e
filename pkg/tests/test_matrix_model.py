import math

import numpy as np
import pytest

from parafvp.errors import InvalidArgumentError, NotEllipticError
from parafvp.matrix_model import (
    build,
    counterexample,
    expm_apply,
    height_function,
    propagator,
)


def random_elliptic(rng, n):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X = B @ B.conj().T / n + 0.1 * np.eye(n)
    S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return X + 1j * (S + S.conj().T) / 2


def random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_diagonal_model():
    m = build(np.diag([1.0, 4.0]))
    assert m.m_A == pytest.approx(1.0)
    assert m.sector_half_angle == pytest.approx(0.0, abs=1e-12)
    assert m.hyponormal and m.accretive_square


def test_identity():
    assert build(np.eye(3)).m_A == pytest.approx(1.0)


def test_counterexample_exact_eigenvalue():
    # Herm(A^2) = X^2 - Y^2; lambda = 1, delta = 1/2 gives [[-1/4, -5/2], [-5/2, 11]],
    # whose smaller eigenvalue is (43 - sqrt(2425))/8
    m = build(counterexample(1.0, 0.5))
    assert m.herm_square_min_eig == pytest.approx((43 - math.sqrt(2425)) / 8, rel=1e-12)
    assert not m.accretive_square
    assert m.sector_half_angle <= math.pi / 4


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.3, 0.5])
@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_counterexample_family(lam, delta):
    m = build(counterexample(lam, delta), seed=7)
    assert m.sector_half_angle <= math.pi / 4
    assert m.herm_square_min_eig < 0
    # the hypothesis |Yv1|^2 = (delta^2 + 1) lam^2 > |Xv1|^2 = lam^2 on v1 = e_1
    Y = counterexample(lam, delta).imag
    assert np.linalg.norm(Y[:, 0]) ** 2 == pytest.approx((delta**2 + 1) * lam**2)


def test_not_elliptic():
    with pytest.raises(NotEllipticError):
        build(np.diag([1.0, -1.0]))
    with pytest.raises(NotEllipticError):
        build(1j * np.eye(2))
    with pytest.raises(InvalidArgumentError):
        build(np.ones((2, 3)))


def test_expm_examples():
    m = build(np.diag([1.0, 4.0]))
    np.testing.assert_allclose(expm_apply(m, 1.0, [1, 1]), [math.exp(-1), math.exp(-4)],
                               rtol=1e-14)
    np.testing.assert_array_equal(expm_apply(m, 0.0, [1, 2]), [1, 2])


def test_expm_against_rk4(rng):
    for n in (2, 4, 6):
        A = random_elliptic(rng, n)
        m = build(A, n_samples=100)
        v = random_unit(rng, n)
        u = v.astype(complex)
        h = 1e-5
        for _ in range(int(round(0.5 / h))):
            k1 = -A @ u
            k2 = -A @ (u + 0.5 * h * k1)
            k3 = -A @ (u + 0.5 * h * k2)
            k4 = -A @ (u + h * k3)
            u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        got = expm_apply(m, 0.5, v)
        assert np.linalg.norm(got - u) <= 1e-8 * np.linalg.norm(u)


def test_non_diagonalizable_path():
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    m = build(A + 0.5 * np.eye(2))
    assert m._eig is None
    t = 0.7
    expected = math.exp(-1.5 * t) * np.array([[1, -t], [0, 1]])
    np.testing.assert_allclose(propagator(m, t), expected, rtol=1e-13, atol=1e-15)


def test_contraction(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        m = build(random_elliptic(rng, n), n_samples=50)
        for t in (0.1, 1.0, 10.0):
            assert np.linalg.norm(propagator(m, t), 2) <= 1 + 1e-12


def test_invertible_for_all_t(rng):
    # finite dimensions: det e^{-tA} = e^{-t tr A} never vanishes
    for _ in range(20):
        n = int(rng.integers(1, 7))
        A = random_elliptic(rng, n)
        m = build(A, n_samples=50)
        for t in (0.1, 1.0, 5.0):
            P = propagator(m, t)
            assert abs(np.linalg.det(P)) == pytest.approx(abs(np.exp(-t * np.trace(A))),
                                                          rel=1e-8)


def test_height_diagonal():
    m = build(np.diag([1.0, 4.0]))
    t = np.linspace(0, 3, 31)
    r = height_function(m, [1, 0], t)
    np.testing.assert_allclose(r.h, np.exp(-t), rtol=1e-14)
    assert r.slope0 == pytest.approx(-1.0, abs=1e-4)
    assert r.slope_matches and r.slope_bound_holds


def test_height_upper_triangular():
    m = build([[1, 1], [0, 2]])
    r = height_function(m, [1, 0], np.linspace(0, 3, 301))
    assert r.decreasing
    assert r.slope_bound_holds and r.slope_matches
    if m.convexity_expected:
        assert r.convex


def test_height_normal_complex_pair(rng):
    # A = [[1, -1], [1, 1]] is normal with eigenvalues 1 +- i; h(t) = e^{-t}
    m = build([[1, -1], [1, 1]])
    assert m.hyponormal
    t = np.linspace(0, 3, 301)
    r = height_function(m, random_unit(rng, 2), t)
    np.testing.assert_allclose(r.h, np.exp(-t), rtol=1e-12)
    assert r.convex


def test_height_rejects_zero():
    with pytest.raises(InvalidArgumentError):
        height_function(build(np.eye(2)), [0, 0], [0, 1])


def test_convexity_under_flags(rng):
    t = np.arange(0, 2.0 + 1e-12, 1e-3)
    checked = 0
    models = [build(np.diag([1.0, 3.0, 7.0])), build([[2, -1], [1, 2]])]
    for _ in range(40):
        n = int(rng.integers(2, 5))
        X = np.diag(rng.uniform(1, 3, size=n))
        Y = np.diag(rng.normal(size=n)) * 0.5
        models.append(build(X + 1j * Y, n_samples=100))
    for m in models:
        assert m.convexity_expected
        for _ in range(3):
            r = height_function(m, random_unit(rng, m.n), t)
            assert r.decreasing
            assert np.all(r.second_diff > -1e-12)
            assert r.slope_bound_holds and r.slope_matches
            checked += 1
    assert checked >= 100


def test_slope_matches_numerical_range(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        m = build(random_elliptic(rng, n), n_samples=100)
        r = height_function(m, random_unit(rng, n), [0.0, 0.1])
        assert r.slope_bound_holds
        assert r.slope_matches
