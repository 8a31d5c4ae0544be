import math

import numpy as np
import pytest

import capabench as cb
from capabench.errors import DisconnectedDomain, ZeroField

from oracles import bessel_root


def test_interval_eigenvalue():
    g = cb.build_domain(cb.Box((0.0,), (1.0,)), 1 / 512)
    res = cb.fundamental_eigenvalue(g)
    assert abs(res.lam - math.pi**2) / math.pi**2 < 1e-3
    assert res.residual <= 1e-6


def test_square_eigenvalue():
    g = cb.build_domain(cb.Box((0.0, 0.0), (1.0, 1.0)), 1 / 128)
    res = cb.fundamental_eigenvalue(g)
    exact = 2 * math.pi**2
    assert abs(res.lam - exact) / exact < 5e-3


def test_disk_eigenvalue():
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 128)
    res = cb.fundamental_eigenvalue(g)
    exact = bessel_root(0) ** 2
    assert abs(res.lam - exact) / exact < 0.01
    # normalized ground state of one sign
    assert res.eigenfield.norm_lp(2) == pytest.approx(1.0, rel=1e-9)
    vals = res.eigenfield.values[g.interior]
    assert vals.min() > -1e-8 * vals.max()


def test_eigen_rayleigh_consistency():
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 64)
    res = cb.fundamental_eigenvalue(g)
    rq = cb.rayleigh_quotient(res.eigenfield, 2)
    assert abs(rq - res.lam) / res.lam <= 1e-6


def test_domain_monotonicity():
    g_small = cb.build_domain(cb.Ball((0.0, 0.0), 0.8), 1 / 64)
    g_big = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 64)
    l_small = cb.fundamental_eigenvalue(g_small).lam
    l_big = cb.fundamental_eigenvalue(g_big).lam
    assert l_small >= l_big * (1 - 1e-9)


def test_disconnected_refused_and_per_component():
    two = cb.CustomMask(
        lambda p: ((np.abs(p[..., 0] - 0.25) < 0.15)
                   | (np.abs(p[..., 0] - 0.75) < 0.2))
                  & (p[..., 1] > 0) & (p[..., 1] < 1),
        (0.0, 0.0), (1.0, 1.0))
    g = cb.build_domain(two, 1 / 64, allow_multiple_components=True)
    with pytest.raises(DisconnectedDomain):
        cb.fundamental_eigenvalue(g)
    res = cb.fundamental_eigenvalue(g, per_component=True)
    # ground state lives on the wider strip (width 0.4): pi^2 (1/0.16 + 1),
    # up to the O(h) offset of the zero layer for non-lattice-aligned walls
    exact = math.pi**2 * (1 / 0.16 + 1)
    assert abs(res.lam - exact) / exact < 0.04


def test_rayleigh_quotient_tent_1d():
    g = cb.build_domain(cb.Box((0.0,), (1.0,)), 1 / 256)
    u = cb.ScalarField.from_callable(
        g, lambda p: np.maximum(0.0, 1 - np.abs(2 * p[..., 0] - 1)))
    rq = cb.rayleigh_quotient(u, 1)
    assert abs(rq - 4.0) < 0.05


def test_rayleigh_scale_invariance(disk64):
    u = cb.ScalarField.from_callable(
        disk64, lambda p: np.maximum(0.0, 1 - np.sum(p**2, axis=-1)))
    for p in (1, 2):
        a = cb.rayleigh_quotient(u, p)
        b = cb.rayleigh_quotient(u.scaled(7.5), p)
        assert abs(a - b) <= 1e-12 * a


def test_rayleigh_zero_field(disk64):
    u = cb.ScalarField(disk64, np.zeros(disk64.extents))
    with pytest.raises(ZeroField):
        cb.rayleigh_quotient(u, 2)


def test_eigenfield_quotient_definitional():
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 96)
    res = cb.fundamental_eigenvalue(g)
    assert cb.rayleigh_quotient(res.eigenfield, 2) == pytest.approx(
        res.lam, rel=1e-6)
