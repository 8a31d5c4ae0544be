"""Pure-numpy reference implementation of the stencil kernels.

Selected automatically when the compiled extension is unavailable or when
``CAPABENCH_PURE_PYTHON=1``.  Arrays are C-contiguous ndarrays over the full
grid box; fields are kept identically zero on non-interior nodes, so shifted
reads implement the zero Dirichlet extension for free.
"""

import numpy as np

BACKEND = "numpy"


def _shift_minus(u, axis):
    """u[..., i+1, ...] placed at i; zero fill at the high edge."""
    out = np.zeros_like(u)
    src = [slice(None)] * u.ndim
    dst = [slice(None)] * u.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    out[tuple(dst)] = u[tuple(src)]
    return out


def _shift_plus(u, axis):
    """u[..., i-1, ...] placed at i; zero fill at the low edge."""
    out = np.zeros_like(u)
    src = [slice(None)] * u.ndim
    dst = [slice(None)] * u.ndim
    src[axis] = slice(0, -1)
    dst[axis] = slice(1, None)
    out[tuple(dst)] = u[tuple(src)]
    return out


def lap_apply(u, mask, inv_h2, out):
    """out = mask * (2n*u - sum of face neighbours) * inv_h2.

    ``u`` must vanish on non-mask nodes (zero Dirichlet extension).
    """
    n = u.ndim
    acc = (2.0 * n) * u
    for ax in range(n):
        acc -= _shift_minus(u, ax)
        acc -= _shift_plus(u, ax)
    np.multiply(acc, inv_h2, out=out)
    out[~mask] = 0.0
    return out


def weighted_apply(u, weights, mask, inv_h2, out):
    """Edge-weighted graph Laplacian apply.

    ``weights[d][c]`` is the weight of the edge (c, c + e_d); a zero weight
    removes the edge.  For a masked node a,
    out[a] = inv_h2 * sum_d (w_d[a] * (u[a] - u[a+e_d])
                             + w_d[a-e_d] * (u[a] - u[a-e_d])).
    """
    n = u.ndim
    acc = np.zeros_like(u)
    for ax in range(n):
        fwd = weights[ax] * (u - _shift_minus(u, ax))
        acc += fwd
        acc -= _shift_plus(fwd, ax)
    np.multiply(acc, inv_h2, out=out)
    out[~mask] = 0.0
    return out


def grad_sq(u, out):
    """Per-cell squared forward-difference gradient: sum_d (u[c+e_d]-u[c])^2.

    Cells in the last slab along an axis have no forward neighbour and
    contribute zero for that axis.
    """
    n = u.ndim
    out[...] = 0.0
    for ax in range(n):
        d = _shift_minus(u, ax) - u
        idx = [slice(None)] * n
        idx[ax] = slice(-1, None)
        d[tuple(idx)] = 0.0
        out += d * d
    return out


def weighted_grad_sq(u, weights, out):
    """Per-cell sum_d w_d[c] * (u[c+e_d]-u[c])^2 with edge weights."""
    n = u.ndim
    out[...] = 0.0
    for ax in range(n):
        d = _shift_minus(u, ax) - u
        idx = [slice(None)] * n
        idx[ax] = slice(-1, None)
        d[tuple(idx)] = 0.0
        out += weights[ax] * d * d
    return out
