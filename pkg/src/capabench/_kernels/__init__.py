"""Kernel dispatch: compiled extension when available, numpy otherwise.

``CAPABENCH_PURE_PYTHON=1`` forces the numpy path (used by the benchmark and
by tests that compare the two backends).
"""

import os

import numpy as np

from . import numpy_ref

_compiled = None
if os.environ.get("CAPABENCH_PURE_PYTHON", "0") != "1":
    try:
        from . import _stencil as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"


def lap_apply(u, mask, inv_h2, out):
    if _compiled is not None and u.ndim == 2:
        _compiled.lap_apply_2d(u, mask, inv_h2, out)
        return out
    if _compiled is not None and u.ndim == 3:
        _compiled.lap_apply_3d(u, mask, inv_h2, out)
        return out
    return numpy_ref.lap_apply(u, mask.astype(bool), inv_h2, out)


def weighted_apply(u, weights, mask, inv_h2, out):
    if _compiled is not None and u.ndim == 2:
        _compiled.weighted_apply_2d(u, weights[0], weights[1], mask, inv_h2, out)
        return out
    if _compiled is not None and u.ndim == 3:
        _compiled.weighted_apply_3d(u, weights[0], weights[1], weights[2],
                                    mask, inv_h2, out)
        return out
    return numpy_ref.weighted_apply(u, weights, mask.astype(bool), inv_h2, out)


def grad_sq(u, out):
    if _compiled is not None and u.ndim == 2:
        _compiled.grad_sq_2d(u, out)
        return out
    if _compiled is not None and u.ndim == 3:
        _compiled.grad_sq_3d(u, out)
        return out
    return numpy_ref.grad_sq(u, out)


def weighted_grad_sq(u, weights, out):
    if _compiled is not None and u.ndim == 2:
        _compiled.weighted_grad_sq_2d(u, weights[0], weights[1], out)
        return out
    if _compiled is not None and u.ndim == 3:
        _compiled.weighted_grad_sq_3d(u, weights[0], weights[1], weights[2], out)
        return out
    return numpy_ref.weighted_grad_sq(u, weights, out)


def as_mask(a):
    """uint8 view/copy of a boolean mask, as the kernels expect."""
    if a.dtype == np.uint8:
        return a
    return a.astype(np.uint8)
