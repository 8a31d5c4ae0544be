"""Relative harmonic, p- and condenser capacities by energy minimization.

The equilibrium potential is pinned to 1 on the inner plate and 0 on the
outer constraint; the reported value is the discrete gradient energy of the
minimizer, which approximates the continuum capacity of the union of member
cells.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateCondenser, NotConverged, UnsupportedCase
from .grid import NodeSet, ScalarField, gradient_energy
from .solvers import LaplaceOperator, WeightedOperator, cg

WEIGHT_FLOOR = 1e-12
IRLS_DAMPING = 0.5


@dataclass
class CapacityResult:
    value: float
    minimizer: ScalarField
    iterations: int
    residual: float
    p: float = 2.0

    def to_json(self):
        return {"value": self.value, "iterations": self.iterations,
                "residual": self.residual, "p": self.p}


@dataclass(frozen=True)
class Condenser:
    """Pair of disjoint closed node sets inside one grid."""

    f1: NodeSet
    f2: NodeSet

    def __post_init__(self):
        if self.f1.grid is not self.f2.grid:
            raise DegenerateCondenser("condenser plates live on different grids")
        if np.any(self.f1.mask & self.f2.mask):
            raise DegenerateCondenser("condenser plates intersect")


def _zero_result(grid, p):
    return CapacityResult(0.0, ScalarField(grid, np.zeros(grid.extents)),
                          0, 0.0, p)


def _clamped_field(grid, values):
    return ScalarField(grid, np.clip(values, 0.0, 1.0))


def harmonic_capacity(F: NodeSet, omega, tol=1e-8, maxiter=None, x0=None,
                      allow_boundary_touch=False):
    """cap(F; Omega): Dirichlet energy of the equilibrium potential.

    Solves the discrete Laplace equation on Interior minus F with u = 1 on F
    and the zero extension outside the interior.  Sets touching the boundary
    layer are refused unless ``allow_boundary_touch`` (level-set machinery
    integrates such capacities; their weights saturate in the integrands).
    """
    grid = omega
    if F.grid is not grid:
        raise DegenerateCondenser("node set does not belong to the domain grid")
    if F.is_empty():
        return _zero_result(grid, 2.0)
    if F.touches_boundary_layer() and not allow_boundary_touch:
        raise DegenerateCondenser("compactum touches the boundary layer")
    unknown = grid.interior & ~F.mask
    op = LaplaceOperator(grid, unknown)
    fixed = F.mask.astype(np.float64)
    b = op.rhs_from_fixed(fixed)
    x, iters, relres = cg(op, b, x0=x0, tol=tol, maxiter=maxiter)
    u = x + fixed
    value = gradient_energy(ScalarField(grid, u), 2)
    return CapacityResult(value, _clamped_field(grid, u), iters, relres, 2.0)


def _cell_weights(grid, values, p, exist=None):
    gsq = np.empty(grid.extents, np.float64)
    if exist is None:
        K.grad_sq(values, gsq)
    else:
        K.weighted_grad_sq(values, exist, gsq)
    gsq /= grid.spacing**2
    w = np.maximum(gsq, WEIGHT_FLOOR) ** ((p - 2.0) / 2.0)
    return np.ascontiguousarray(w)


def _p_energy(grid, values, p, exist=None):
    gsq = np.empty(grid.extents, np.float64)
    if exist is None:
        K.grad_sq(values, gsq)
    else:
        K.weighted_grad_sq(values, exist, gsq)
    n, h = grid.dim, grid.spacing
    return float(np.sum(gsq ** (p / 2.0)) * h ** (n - p))


def _irls(grid, unknown, fixed, p, exist, tol, irls_tol, max_irls, maxiter):
    """Iteratively reweighted least squares for the p-energy minimum."""
    if exist is None:
        op0 = LaplaceOperator(grid, unknown)
    else:
        op0 = WeightedOperator(grid, unknown, exist)
    b = op0.rhs_from_fixed(fixed)
    x, iters, relres = cg(op0, b, tol=tol, maxiter=maxiter)
    u = x + fixed
    energy = _p_energy(grid, u, p, exist)
    total_iters = iters
    w = None
    for _ in range(max_irls):
        w_raw = _cell_weights(grid, u, p, exist)
        if w is None:
            w = w_raw
        else:
            # geometric damping keeps the weights from oscillating
            w = w ** (1.0 - IRLS_DAMPING) * w_raw**IRLS_DAMPING
        if exist is None:
            weights = [w] * grid.dim
        else:
            weights = [np.ascontiguousarray(w * e) for e in exist]
        op = WeightedOperator(grid, unknown, weights)
        b = op.rhs_from_fixed(fixed)
        x, iters, relres = cg(op, b, x0=x, tol=tol, maxiter=maxiter,
                              precond_diag=op.diagonal())
        u = x + fixed
        new_energy = _p_energy(grid, u, p, exist)
        total_iters += iters
        done = abs(new_energy - energy) <= irls_tol * max(new_energy, 1e-300)
        energy = new_energy
        if done:
            return u, energy, total_iters, relres
    raise NotConverged(
        f"IRLS did not stabilize within {max_irls} reweightings",
        last_result=CapacityResult(energy, _clamped_field(grid, u),
                                   total_iters, relres, p))


def p_capacity(F: NodeSet, omega, p, tol=1e-8, irls_tol=1e-8, max_irls=80,
               maxiter=None, allow_boundary_touch=False):
    """cap_p(F; Omega) via iteratively reweighted linear solves (p > 1)."""
    if p <= 1:
        raise UnsupportedCase("p-capacity requires p > 1")
    if p == 2:
        return harmonic_capacity(F, omega, tol=tol, maxiter=maxiter,
                                 allow_boundary_touch=allow_boundary_touch)
    grid = omega
    if F.is_empty():
        return _zero_result(grid, p)
    if F.touches_boundary_layer() and not allow_boundary_touch:
        raise DegenerateCondenser("compactum touches the boundary layer")
    unknown = grid.interior & ~F.mask
    fixed = F.mask.astype(np.float64)
    u, energy, iters, relres = _irls(grid, unknown, fixed, p, None, tol,
                                     irls_tol, max_irls, maxiter)
    return CapacityResult(energy, _clamped_field(grid, u), iters, relres, p)


def _edge_exists(grid, active):
    """Per-axis masks of edges with both endpoints in ``active``."""
    exist = []
    for ax in range(grid.dim):
        e = np.zeros(grid.extents, np.float64)
        src = [slice(None)] * grid.dim
        dst = [slice(None)] * grid.dim
        src[ax] = slice(1, None)
        dst[ax] = slice(0, -1)
        e[tuple(dst)] = active[tuple(src)]
        e *= active
        exist.append(np.ascontiguousarray(e))
    return exist


def _edge_zero_extension(grid):
    """Edges with at least one interior endpoint (zero Dirichlet extension)."""
    interior = grid.interior.astype(np.float64)
    exist = []
    for ax in range(grid.dim):
        nbr = np.zeros(grid.extents, np.float64)
        src = [slice(None)] * grid.dim
        dst = [slice(None)] * grid.dim
        src[ax] = slice(1, None)
        dst[ax] = slice(0, -1)
        nbr[tuple(dst)] = interior[tuple(src)]
        e = np.maximum(interior, nbr)
        exist.append(np.ascontiguousarray(e))
    return exist


def condenser_capacity(c: Condenser, p=2.0, boundary="natural", tol=1e-8,
                       irls_tol=1e-8, max_irls=80, maxiter=None):
    """cap_p(F1, F2; Omega): u pinned to 1 on F1 and 0 on F2.

    With ``boundary='natural'`` the admissible class is free on the domain
    boundary (edges crossing it carry no energy); ``'dirichlet'`` adds the
    zero trace on the boundary layer.
    """
    grid = c.f1.grid
    if c.f1.is_empty() or c.f2.is_empty():
        raise DegenerateCondenser("both condenser plates must be nonempty")
    if boundary not in ("natural", "dirichlet"):
        raise UnsupportedCase(f"unknown boundary mode {boundary!r}")
    if boundary == "natural":
        exist = _edge_exists(grid, grid.interior.astype(np.float64))
    else:
        exist = _edge_zero_extension(grid)
    unknown = grid.interior & ~c.f1.mask & ~c.f2.mask
    fixed = c.f1.mask.astype(np.float64)
    if p == 2:
        op = WeightedOperator(grid, unknown, exist)
        b = op.rhs_from_fixed(fixed)
        x, iters, relres = cg(op, b, tol=tol, maxiter=maxiter,
                              precond_diag=op.diagonal())
        u = x + fixed
        energy = _p_energy(grid, u, 2.0, exist)
        return CapacityResult(energy, _clamped_field(grid, u), iters, relres, 2.0)
    if p <= 1:
        raise UnsupportedCase("condenser capacity requires p > 1")
    u, energy, iters, relres = _irls(grid, unknown, fixed, p, exist, tol,
                                     irls_tol, max_irls, maxiter)
    return CapacityResult(energy, _clamped_field(grid, u), iters, relres, p)


# ---------------------------------------------------------------------------
# closed forms for spherical condensers (test oracles and reference values)
# ---------------------------------------------------------------------------

def sphere_surface_area(dim):
    """|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def spherical_condenser_exact(r, R, dim, p=2.0):
    """Closed-form cap_p of the condenser (B_r, complement of B_R).

    ``R = inf`` is accepted where the capacity stays positive.  p = 1 returns
    the inner sphere area (the perimeter-minimal cross section).
    """
    if not (0 < r < R):
        raise UnsupportedCase("need 0 < r < R")
    if dim < 2:
        raise UnsupportedCase("dimension must be >= 2")
    if p < 1:
        raise UnsupportedCase("p must be >= 1")
    area = sphere_surface_area(dim)
    if p == 1:
        return area * r ** (dim - 1)
    if p == dim:
        if math.isinf(R):
            raise UnsupportedCase("cap_n of a compactum in R^n is zero")
        return area * (math.log(R / r)) ** (1 - dim)
    expo = (p - dim) / (p - 1.0)
    if math.isinf(R):
        if p > dim:
            raise UnsupportedCase("capacity at infinity is zero for p > n")
        tail = 0.0
    else:
        tail = R**expo
    return (area * (abs(dim - p) / (p - 1.0)) ** (p - 1.0)
            * abs(r**expo - tail) ** (1.0 - p))
