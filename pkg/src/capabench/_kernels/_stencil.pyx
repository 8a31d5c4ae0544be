# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels for 2-D and 3-D grids.

Single-pass loops over the grid box; the numpy fallback performs the same
arithmetic with whole-array shifts.  Fields must vanish on non-mask nodes.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

ctypedef cnp.float64_t f8
ctypedef cnp.uint8_t u1


def lap_apply_2d(f8[:, ::1] u, u1[:, ::1] mask, double inv_h2, f8[:, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(nx):
        for j in range(ny):
            if mask[i, j]:
                acc = 4.0 * u[i, j]
                if i > 0:
                    acc -= u[i - 1, j]
                if i < nx - 1:
                    acc -= u[i + 1, j]
                if j > 0:
                    acc -= u[i, j - 1]
                if j < ny - 1:
                    acc -= u[i, j + 1]
                out[i, j] = acc * inv_h2
            else:
                out[i, j] = 0.0


def lap_apply_3d(f8[:, :, ::1] u, u1[:, :, ::1] mask, double inv_h2,
                 f8[:, :, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if mask[i, j, k]:
                    acc = 6.0 * u[i, j, k]
                    if i > 0:
                        acc -= u[i - 1, j, k]
                    if i < nx - 1:
                        acc -= u[i + 1, j, k]
                    if j > 0:
                        acc -= u[i, j - 1, k]
                    if j < ny - 1:
                        acc -= u[i, j + 1, k]
                    if k > 0:
                        acc -= u[i, j, k - 1]
                    if k < nz - 1:
                        acc -= u[i, j, k + 1]
                    out[i, j, k] = acc * inv_h2
                else:
                    out[i, j, k] = 0.0


def weighted_apply_2d(f8[:, ::1] u, f8[:, ::1] wx, f8[:, ::1] wy,
                      u1[:, ::1] mask, double inv_h2, f8[:, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(nx):
        for j in range(ny):
            if mask[i, j]:
                acc = 0.0
                if i < nx - 1:
                    acc += wx[i, j] * (u[i, j] - u[i + 1, j])
                if i > 0:
                    acc += wx[i - 1, j] * (u[i, j] - u[i - 1, j])
                if j < ny - 1:
                    acc += wy[i, j] * (u[i, j] - u[i, j + 1])
                if j > 0:
                    acc += wy[i, j - 1] * (u[i, j] - u[i, j - 1])
                out[i, j] = acc * inv_h2
            else:
                out[i, j] = 0.0


def weighted_apply_3d(f8[:, :, ::1] u, f8[:, :, ::1] wx, f8[:, :, ::1] wy,
                      f8[:, :, ::1] wz, u1[:, :, ::1] mask, double inv_h2,
                      f8[:, :, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if mask[i, j, k]:
                    acc = 0.0
                    if i < nx - 1:
                        acc += wx[i, j, k] * (u[i, j, k] - u[i + 1, j, k])
                    if i > 0:
                        acc += wx[i - 1, j, k] * (u[i, j, k] - u[i - 1, j, k])
                    if j < ny - 1:
                        acc += wy[i, j, k] * (u[i, j, k] - u[i, j + 1, k])
                    if j > 0:
                        acc += wy[i, j - 1, k] * (u[i, j, k] - u[i, j - 1, k])
                    if k < nz - 1:
                        acc += wz[i, j, k] * (u[i, j, k] - u[i, j, k + 1])
                    if k > 0:
                        acc += wz[i, j, k - 1] * (u[i, j, k] - u[i, j, k - 1])
                    out[i, j, k] = acc * inv_h2
                else:
                    out[i, j, k] = 0.0


def grad_sq_2d(f8[:, ::1] u, f8[:, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double dx, dy
    for i in range(nx):
        for j in range(ny):
            dx = u[i + 1, j] - u[i, j] if i < nx - 1 else 0.0
            dy = u[i, j + 1] - u[i, j] if j < ny - 1 else 0.0
            out[i, j] = dx * dx + dy * dy


def grad_sq_3d(f8[:, :, ::1] u, f8[:, :, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double dx, dy, dz
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                dx = u[i + 1, j, k] - u[i, j, k] if i < nx - 1 else 0.0
                dy = u[i, j + 1, k] - u[i, j, k] if j < ny - 1 else 0.0
                dz = u[i, j, k + 1] - u[i, j, k] if k < nz - 1 else 0.0
                out[i, j, k] = dx * dx + dy * dy + dz * dz


def weighted_grad_sq_2d(f8[:, ::1] u, f8[:, ::1] wx, f8[:, ::1] wy,
                        f8[:, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j
    cdef double dx, dy
    for i in range(nx):
        for j in range(ny):
            dx = u[i + 1, j] - u[i, j] if i < nx - 1 else 0.0
            dy = u[i, j + 1] - u[i, j] if j < ny - 1 else 0.0
            out[i, j] = wx[i, j] * dx * dx + wy[i, j] * dy * dy


def weighted_grad_sq_3d(f8[:, :, ::1] u, f8[:, :, ::1] wx, f8[:, :, ::1] wy,
                        f8[:, :, ::1] wz, f8[:, :, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double dx, dy, dz
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                dx = u[i + 1, j, k] - u[i, j, k] if i < nx - 1 else 0.0
                dy = u[i, j + 1, k] - u[i, j, k] if j < ny - 1 else 0.0
                dz = u[i, j, k + 1] - u[i, j, k] if k < nz - 1 else 0.0
                out[i, j, k] = (wx[i, j, k] * dx * dx + wy[i, j, k] * dy * dy
                                + wz[i, j, k] * dz * dz)
