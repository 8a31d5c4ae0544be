"""Matrix-free conjugate-gradient machinery on masked grids.

The operator is the (2n+1)-point Laplacian restricted to unknown nodes, in
plain or edge-weighted form.  Vectors are full-box arrays kept identically
zero outside the unknown set, which makes the zero Dirichlet extension and
the scalar products trivial.
"""

import numpy as np

from . import _kernels as K
from .errors import SolverDiverged


class LaplaceOperator:
    """y = (2n u - sum of neighbours) / h^2 on the unknown set."""

    def __init__(self, grid, unknown):
        self.grid = grid
        self.unknown = np.ascontiguousarray(unknown.astype(np.uint8))
        self.inv_h2 = 1.0 / grid.spacing**2
        self._buf = np.empty(grid.extents, np.float64)

    def apply(self, u, out=None):
        if out is None:
            out = self._buf
        K.lap_apply(u, self.unknown, self.inv_h2, out)
        return out

    def diagonal(self):
        return (2.0 * self.grid.dim) * self.inv_h2

    def rhs_from_fixed(self, fixed_values):
        """b = -A(fixed part) on unknowns, for inhomogeneous pinning."""
        b = np.empty(self.grid.extents, np.float64)
        K.lap_apply(np.ascontiguousarray(fixed_values), self.unknown,
                    self.inv_h2, b)
        return -b


class WeightedOperator:
    """Edge-weighted variant; weights[d][c] is the (c, c+e_d) edge weight."""

    def __init__(self, grid, unknown, weights):
        self.grid = grid
        self.unknown = np.ascontiguousarray(unknown.astype(np.uint8))
        self.weights = [np.ascontiguousarray(w, np.float64) for w in weights]
        self.inv_h2 = 1.0 / grid.spacing**2
        self._buf = np.empty(grid.extents, np.float64)

    def apply(self, u, out=None):
        if out is None:
            out = self._buf
        K.weighted_apply(u, self.weights, self.unknown, self.inv_h2, out)
        return out

    def diagonal(self):
        """Per-node diagonal, for Jacobi preconditioning."""
        diag = np.zeros(self.grid.extents, np.float64)
        for ax, w in enumerate(self.weights):
            diag += w
            shifted = np.zeros_like(w)
            src = [slice(None)] * w.ndim
            dst = [slice(None)] * w.ndim
            src[ax] = slice(0, -1)
            dst[ax] = slice(1, None)
            shifted[tuple(dst)] = w[tuple(src)]
            diag += shifted
        return diag * self.inv_h2

    def rhs_from_fixed(self, fixed_values):
        b = np.empty(self.grid.extents, np.float64)
        K.weighted_apply(np.ascontiguousarray(fixed_values), self.weights,
                         self.unknown, self.inv_h2, b)
        return -b


def cg(op, b, x0=None, tol=1e-8, maxiter=None, precond_diag=None):
    """Preconditioned CG for op @ x = b on the operator's unknown set.

    Returns (x, iterations, relative_residual).  Raises SolverDiverged when
    the target is not met within ``maxiter``.
    """
    unknown = op.unknown.astype(bool)
    b = b * unknown
    norm_b = float(np.sqrt(np.sum(b * b)))
    if norm_b == 0.0:
        return np.zeros_like(b), 0, 0.0
    if maxiter is None:
        maxiter = 30 * max(op.grid.extents) + 200

    x = np.zeros_like(b) if x0 is None else (x0 * unknown).astype(np.float64)
    r = b - op.apply(x, np.empty_like(b))
    r *= unknown
    if precond_diag is not None:
        diag_arr = np.where(unknown & (precond_diag > 0), precond_diag, 1.0)
        z = r / diag_arr
    else:
        z = r.copy()
    p = z.copy()
    rz = float(np.sum(r * z))
    relres = float(np.sqrt(np.sum(r * r))) / norm_b
    it = 0
    ap = np.empty_like(b)
    while relres > tol and it < maxiter:
        op.apply(p, ap)
        pap = float(np.sum(p * ap))
        if pap <= 0.0:
            raise SolverDiverged("CG lost positive definiteness")
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        relres = float(np.sqrt(np.sum(r * r))) / norm_b
        if precond_diag is not None:
            z = r / diag_arr
        else:
            z = r
        rz_new = float(np.sum(r * z))
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
        it += 1
    if relres > tol:
        raise SolverDiverged(
            f"CG stalled at relative residual {relres:.3e} after {it} iterations")
    return x, it, relres
