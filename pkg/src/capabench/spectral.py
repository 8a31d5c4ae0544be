"""Fundamental Dirichlet eigenvalue and Rayleigh quotients.

Inverse power iteration (shift 0) on the masked discrete Laplacian, with CG
inner solves whose tolerance tightens as the eigenpair converges.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DisconnectedDomain, SolverDiverged, ZeroField
from .grid import ScalarField, gradient_energy
from .solvers import LaplaceOperator, cg


@dataclass
class EigenResult:
    lam: float
    eigenfield: ScalarField
    residual: float
    iterations: int

    def to_json(self):
        return {"lambda": self.lam, "residual": self.residual,
                "iterations": self.iterations}


def rayleigh_quotient(u: ScalarField, p=2):
    """integral of |grad u|^p over integral of |u|^p, p in {1, 2}."""
    if p not in (1, 2):
        raise ValueError("rayleigh_quotient supports p in {1, 2}")
    denom = u.norm_lp(p) ** p
    if denom == 0.0:
        raise ZeroField("Rayleigh quotient of the zero field")
    return gradient_energy(u, p) / denom


def _components(grid):
    labels, ncomp = ndimage.label(
        grid.interior, structure=ndimage.generate_binary_structure(grid.dim, 1))
    return labels, ncomp


def fundamental_eigenvalue(omega, tol=1e-6, max_outer=400, cg_tol=1e-10,
                           per_component=False, x0=None):
    """Smallest eigenvalue of the masked Dirichlet Laplacian on ``omega``.

    Stops when the eigenvalue stagnates and the relative residual
    ||A u - lambda u|| / (lambda ||u||) is at most ``tol``.  ``x0`` seeds the
    inverse iteration (e.g. a prolongated coarse-grid eigenfield).
    """
    if omega.interior_count == 0:
        raise ZeroField("domain has no interior nodes")
    labels, ncomp = _components(omega)
    if ncomp > 1:
        if not per_component:
            raise DisconnectedDomain(
                f"{ncomp} interior components; pass per_component=True")
        best = None
        for comp in range(1, ncomp + 1):
            sub = _restricted_eigen(omega, labels == comp, tol, max_outer,
                                    cg_tol, x0)
            if best is None or sub.lam < best.lam:
                best = sub
        return best
    return _restricted_eigen(omega, omega.interior, tol, max_outer, cg_tol, x0)


def _restricted_eigen(grid, support, tol, max_outer, cg_tol, x0=None):
    op = LaplaceOperator(grid, support)
    hn = grid.spacing**grid.dim

    u = None
    if x0 is not None:
        u = np.asarray(x0, np.float64) * support
        if not np.any(u):
            u = None
    if u is None:
        u = support.astype(np.float64)
    u = u / np.sqrt(np.sum(u * u) * hn)
    au = op.apply(u, np.empty_like(u)).copy()
    lam = float(np.sum(u * au) * hn)
    total_inner = 0
    residual = np.inf
    x = u / lam
    for outer in range(max_outer):
        inner_tol = max(min(1e-2, 0.05 * residual), cg_tol)
        x, inner, _ = cg(op, u, x0=x, tol=inner_tol)
        total_inner += inner
        nrm = np.sqrt(np.sum(x * x) * hn)
        if nrm == 0.0:
            raise SolverDiverged("inverse iteration produced the zero vector")
        u_new = x / nrm
        au = op.apply(u_new, np.empty_like(u_new)).copy()
        lam_new = float(np.sum(u_new * au) * hn)
        residual = float(np.sqrt(np.sum((au - lam_new * u_new) ** 2) * hn)
                         / abs(lam_new))
        stagnated = abs(lam_new - lam) <= 0.1 * tol * abs(lam_new)
        u, lam = u_new, lam_new
        x = u / lam
        if residual <= tol and stagnated:
            break
    else:
        raise SolverDiverged(
            f"inverse iteration: residual {residual:.2e} after {max_outer} steps")

    if float(np.sum(u)) < 0.0:
        u = -u
    field = ScalarField(grid, u)
    return EigenResult(lam, field, residual, total_inner)
