"""Dirichlet-Laplacian eigensystems on an interval and a rectangle.

Eigenfunctions are exact sines, so nothing here is approximate except the
quadrature used by :func:`project`. The rectangle basis is stored in tensor
form: each axis carries its own 1D sine factors and quadrature rule.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisMismatchError, InvalidArgumentError

GL_NODES_PER_CELL = 8
# minimum quadrature nodes per retained mode along an axis
MIN_NODES_PER_MODE = 12


def _composite_gauss_legendre(length, n_quad, n_modes):
    cells = max(math.ceil(n_quad / GL_NODES_PER_CELL),
                math.ceil(MIN_NODES_PER_MODE * n_modes / GL_NODES_PER_CELL), 1)
    ref_x, ref_w = np.polynomial.legendre.leggauss(GL_NODES_PER_CELL)
    edges = np.linspace(0.0, length, cells + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (ref_x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _sine_factors(x, length, k):
    """Matrix of sqrt(2/L) sin(k pi x / L), shape (len(x), len(k))."""
    x = np.asarray(x, dtype=float)
    return math.sqrt(2.0 / length) * np.sin(np.outer(x, k) * (math.pi / length))


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Truncated eigensystem of A = -Laplacian with Dirichlet conditions.

    ``mode_index`` has shape (n_modes, d) and holds the 1-based (k,) or (k, l)
    behind each sorted eigenvalue. ``axis_nodes``/``axis_weights`` are the
    per-axis composite Gauss-Legendre rules.
    """

    domain_kind: str
    lengths: tuple
    eigenvalues: np.ndarray
    mode_index: np.ndarray
    axis_nodes: tuple
    axis_weights: tuple
    axis_modes: tuple = field(default=())

    @property
    def n_modes(self):
        return self.eigenvalues.size

    @property
    def dim(self):
        return len(self.lengths)

    @property
    def key(self):
        return (self.domain_kind, self.lengths, self.n_modes, self.axis_modes)

    @property
    def quad_grid(self):
        """(nodes, weights); nodes have shape (Q,) or (Q, 2) flattened C-order."""
        if self.domain_kind == "interval":
            return self.axis_nodes[0], self.axis_weights[0]
        xs, ys = self.axis_nodes
        wx, wy = self.axis_weights
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()]), np.outer(wx, wy).ravel()

    @property
    def quad_shape(self):
        return tuple(n.size for n in self.axis_nodes)

    def complete_cutoff(self):
        """Largest value below which every eigenvalue is retained."""
        if self.domain_kind == "interval":
            return float(self.eigenvalues[-1])
        (lx, ly), (mx, my) = self.lengths, self.axis_modes
        return min(((mx + 1) * math.pi / lx) ** 2 + (math.pi / ly) ** 2,
                   (math.pi / lx) ** 2 + ((my + 1) * math.pi / ly) ** 2)

    def axis_factors(self, axis, x):
        k = np.arange(1, self.axis_modes[axis] + 1)
        return _sine_factors(x, self.lengths[axis], k)

    def evaluate(self, points):
        """Eigenfunction values, shape (n_points, n_modes)."""
        if self.domain_kind == "interval":
            return _sine_factors(np.ravel(points), self.lengths[0],
                                 self.mode_index[:, 0])
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != 2:
            raise InvalidArgumentError("rectangle points must have shape (P, 2)")
        fx = self.axis_factors(0, pts[:, 0])
        fy = self.axis_factors(1, pts[:, 1])
        k = self.mode_index[:, 0] - 1
        l = self.mode_index[:, 1] - 1
        return fx[:, k] * fy[:, l]

    def check_same(self, other):
        if other is not self and other.key != self.key:
            raise BasisMismatchError("spectral data belong to different eigensystems")


@dataclass(frozen=True, eq=False)
class SpectralVector:
    """Coefficients c_j = <v, e_j> in an :class:`EigenSystem` (always complex)."""

    coeffs: np.ndarray
    basis: EigenSystem

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size != self.basis.n_modes:
            raise InvalidArgumentError(
                f"expected {self.basis.n_modes} coefficients, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("spectral coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, basis):
        return cls(np.zeros(basis.n_modes), basis)

    @classmethod
    def unit(cls, basis, mode, scale=1.0):
        """``scale * e_mode`` with a 1-based mode number."""
        if not 1 <= mode <= basis.n_modes:
            raise InvalidArgumentError(f"mode {mode} outside 1..{basis.n_modes}")
        c = np.zeros(basis.n_modes, dtype=complex)
        c[mode - 1] = scale
        return cls(c, basis)

    def _other(self, other):
        self.basis.check_same(other.basis)
        return other.coeffs

    def __add__(self, other):
        return SpectralVector(self.coeffs + self._other(other), self.basis)

    def __sub__(self, other):
        return SpectralVector(self.coeffs - self._other(other), self.basis)

    def __neg__(self):
        return SpectralVector(-self.coeffs, self.basis)

    def __mul__(self, scalar):
        return SpectralVector(self.coeffs * scalar, self.basis)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise InvalidArgumentError(f"{name} must be positive, got {value!r}")


def interval_basis(length, n_modes, n_quad):
    """Eigensystem on (0, length): e_k = sqrt(2/L) sin(k pi x/L), lambda_k = (k pi/L)^2."""
    _check_positive(length=length, n_modes=n_modes, n_quad=n_quad)
    n_modes, n_quad = int(n_modes), int(n_quad)
    k = np.arange(1, n_modes + 1)
    nodes, weights = _composite_gauss_legendre(length, n_quad, n_modes)
    return EigenSystem(
        domain_kind="interval",
        lengths=(float(length),),
        eigenvalues=(k * math.pi / length) ** 2,
        mode_index=k[:, None],
        axis_nodes=(nodes,),
        axis_weights=(weights,),
        axis_modes=(n_modes,),
    )


def rectangle_basis(lx, ly, modes_per_axis, n_quad_per_axis):
    """Tensor eigensystem on (0, lx) x (0, ly), sorted ascending.

    Ties are broken by the lexicographic order of (k, l).
    """
    _check_positive(lx=lx, ly=ly, modes_per_axis=modes_per_axis,
                    n_quad_per_axis=n_quad_per_axis)
    m, nq = int(modes_per_axis), int(n_quad_per_axis)
    k, l = np.meshgrid(np.arange(1, m + 1), np.arange(1, m + 1), indexing="ij")
    k, l = k.ravel(), l.ravel()
    lam = (k * math.pi / lx) ** 2 + (l * math.pi / ly) ** 2
    order = np.lexsort((l, k, lam))
    xs, wx = _composite_gauss_legendre(lx, nq, m)
    ys, wy = _composite_gauss_legendre(ly, nq, m)
    return EigenSystem(
        domain_kind="rectangle",
        lengths=(float(lx), float(ly)),
        eigenvalues=lam[order],
        mode_index=np.column_stack([k[order], l[order]]),
        axis_nodes=(xs, ys),
        axis_weights=(wx, wy),
        axis_modes=(m, m),
    )


def project(es, samples):
    """Quadrature coefficients <v, e_j> of grid samples on ``es.quad_grid``."""
    samples = np.asarray(samples)
    shape = es.quad_shape
    if es.domain_kind == "interval":
        if samples.shape != shape:
            raise InvalidArgumentError(
                f"samples have shape {samples.shape}, quadrature grid is {shape}")
        E = es.axis_factors(0, es.axis_nodes[0])
        return SpectralVector(E.T @ (es.axis_weights[0] * samples), es)
    if samples.size != shape[0] * shape[1]:
        raise InvalidArgumentError(
            f"samples have {samples.size} values, quadrature grid is {shape}")
    F = samples.reshape(shape)
    Ex = es.axis_factors(0, es.axis_nodes[0])
    Ey = es.axis_factors(1, es.axis_nodes[1])
    wx, wy = es.axis_weights
    C = Ex.T @ (wx[:, None] * F * wy[None, :]) @ Ey
    return SpectralVector(C[es.mode_index[:, 0] - 1, es.mode_index[:, 1] - 1], es)


def synthesize(es, v, eval_grid):
    """Pointwise sum of c_j e_j(x) on ``eval_grid``."""
    es.check_same(v.basis)
    return es.evaluate(eval_grid) @ v.coeffs


def sobolev_norm(v, space="H"):
    """Norm of ``v`` in H (l2), V (lambda-weighted) or Vstar (inverse-weighted)."""
    c2 = np.abs(v.coeffs) ** 2
    lam = v.basis.eigenvalues
    if space == "H":
        return float(np.sqrt(np.sum(c2)))
    if space == "V":
        return float(np.sqrt(np.sum(lam * c2)))
    if space == "Vstar":
        return float(np.sqrt(np.sum(c2 / lam)))
    raise InvalidArgumentError(f"unknown space {space!r}; use 'H', 'V' or 'Vstar'")
