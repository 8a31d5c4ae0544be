import math

import numpy as np
import pytest

import capabench as cb
from capabench.errors import DegenerateCondenser, UnsupportedCase

from oracles import radial_p_capacity


CENTER2 = (0.0, 0.0)
CENTER3 = (0.0, 0.0, 0.0)


def plate(grid, spec):
    return cb.NodeSet.from_compactum(grid, spec)


def test_exact_formulas_match_radial_minimization():
    # the closed forms used as oracles are themselves cross-checked against
    # an independent 1-D finite-difference minimization
    for dim, p in ((2, 2.0), (3, 2.0), (3, 3.0), (2, 3.0), (3, 1.5)):
        exact = cb.spherical_condenser_exact(0.5, 1.0, dim, p)
        num = radial_p_capacity(0.5, 1.0, dim, p)
        assert abs(num - exact) / exact < 2e-3, (dim, p)


def test_exact_formula_reference_points():
    assert cb.spherical_condenser_exact(1.0, math.inf, 3, 2) == pytest.approx(
        4 * math.pi, rel=1e-12)
    assert cb.spherical_condenser_exact(0.5, 1.0, 2, 2) == pytest.approx(
        2 * math.pi / math.log(2), rel=1e-12)
    assert cb.spherical_condenser_exact(0.5, 1.0, 3, 2) == pytest.approx(
        4 * math.pi, rel=1e-12)
    with pytest.raises(UnsupportedCase):
        cb.spherical_condenser_exact(1.0, math.inf, 2, 2)


def test_harmonic_capacity_disk(disk64):
    F = plate(disk64, cb.Ball(CENTER2, 0.5))
    res = cb.harmonic_capacity(F, disk64)
    exact = 2 * math.pi / math.log(2)
    assert abs(res.value - exact) / exact < 0.02
    assert res.residual <= 1e-8
    # minimizer clamped in [0, 1] and reproduces the value
    vals = res.minimizer.values
    assert vals.min() >= 0.0 and vals.max() <= 1.0
    assert cb.gradient_energy(res.minimizer, 2) == pytest.approx(
        res.value, rel=1e-6)


def test_harmonic_capacity_empty(disk64):
    res = cb.harmonic_capacity(cb.NodeSet.empty(disk64), disk64)
    assert res.value == 0.0 and res.iterations == 0


def test_harmonic_capacity_ball3d(ball32):
    F = plate(ball32, cb.Ball(CENTER3, 0.5))
    res = cb.harmonic_capacity(F, ball32)
    assert abs(res.value - 4 * math.pi) / (4 * math.pi) < 0.02


def test_degenerate_when_plate_touches_boundary(disk64):
    F = plate(disk64, cb.Ball(CENTER2, 0.999))
    with pytest.raises(DegenerateCondenser):
        cb.harmonic_capacity(F, disk64)


def test_p_capacity_p2_matches_harmonic(disk64):
    F = plate(disk64, cb.Ball(CENTER2, 0.5))
    r2 = cb.harmonic_capacity(F, disk64)
    rp = cb.p_capacity(F, disk64, 2.0)
    assert abs(rp.value - r2.value) <= 1e-6 * r2.value


def test_p_capacity_p3_ball3d(ball32):
    F = plate(ball32, cb.Ball(CENTER3, 0.5))
    res = cb.p_capacity(F, ball32, 3.0)
    exact = cb.spherical_condenser_exact(0.5, 1.0, 3, 3.0)
    assert abs(res.value - exact) / exact < 0.03


def test_p_capacity_empty(disk64):
    assert cb.p_capacity(cb.NodeSet.empty(disk64), disk64, 3.0).value == 0.0


def test_capacity_monotone_in_set(disk64):
    small = plate(disk64, cb.Ball(CENTER2, 0.3))
    big = plate(disk64, cb.Ball(CENTER2, 0.5))
    c_small = cb.harmonic_capacity(small, disk64).value
    c_big = cb.harmonic_capacity(big, disk64).value
    assert c_small <= c_big * (1 + 1e-9)


def test_capacity_antimonotone_in_domain():
    g1 = cb.build_domain(cb.Ball(CENTER2, 1.0), 1 / 48)
    g2 = cb.build_domain(cb.Ball(CENTER2, 1.5), 1 / 48)
    F1 = plate(g1, cb.Ball(CENTER2, 0.5))
    F2 = plate(g2, cb.Ball(CENTER2, 0.5))
    c1 = cb.harmonic_capacity(F1, g1).value
    c2 = cb.harmonic_capacity(F2, g2).value
    assert c1 >= c2 - 1e-9


def test_equilibrium_level_cap_scaling(disk64):
    # superlevel sets of the equilibrium potential: cap(N_t) = cap(F)/t for
    # the radial case (checked against the exact spherical condenser values)
    F = plate(disk64, cb.Ball(CENTER2, 0.5))
    res = cb.harmonic_capacity(F, disk64)
    for t in (0.4, 0.6, 0.8):
        Nt = res.minimizer.superlevel_set(t)
        ct = cb.harmonic_capacity(Nt, disk64).value
        assert abs(ct - res.value / t) / (res.value / t) < 0.03


def test_condenser_matches_p_capacity(disk64):
    # F2 = Omega \ G with F inside G: condenser equals cap_p(F; G)
    F = plate(disk64, cb.Ball(CENTER2, 0.3))
    G = cb.Ball(CENTER2, 0.8)
    G_mask = cb.NodeSet.from_indicator(disk64, G.inside)
    F2 = cb.NodeSet(disk64, disk64.interior & ~G_mask.mask)
    cond = cb.condenser_capacity(cb.Condenser(F, F2), p=2.0)
    gsub = cb.build_domain(G, disk64.spacing)
    Fsub = plate(gsub, cb.Ball(CENTER2, 0.3))
    direct = cb.harmonic_capacity(Fsub, gsub)
    assert abs(cond.value - direct.value) <= 2e-2 * direct.value


def test_condenser_swap_symmetry(disk64):
    F1 = plate(disk64, cb.Ball((-0.4, 0.0), 0.2))
    F2 = plate(disk64, cb.Ball((0.45, 0.1), 0.25))
    a = cb.condenser_capacity(cb.Condenser(F1, F2), p=2.0)
    b = cb.condenser_capacity(cb.Condenser(F2, F1), p=2.0)
    assert abs(a.value - b.value) <= 1e-6 * a.value


def test_condenser_slabs_linear_profile():
    g = cb.build_domain(cb.Box((0.0, 0.0), (1.0, 1.0)), 1 / 128)
    a, b = 0.25, 0.75
    F1 = cb.NodeSet.from_indicator(g, lambda p: p[..., 0] <= a)
    F2 = cb.NodeSet.from_indicator(g, lambda p: p[..., 0] >= b)
    for p in (2.0, 3.0):
        res = cb.condenser_capacity(cb.Condenser(F1, F2), p=p)
        expected = (b - a) ** (1 - p) * 1.0  # unit cross-section
        assert abs(res.value - expected) / expected < 0.02, p


def test_condenser_rejects_overlap(disk64):
    F1 = plate(disk64, cb.Ball(CENTER2, 0.4))
    F2 = plate(disk64, cb.Ball((0.2, 0.0), 0.4))
    with pytest.raises(DegenerateCondenser):
        cb.Condenser(F1, F2)


def test_capacity_result_serialization(disk64):
    F = plate(disk64, cb.Ball(CENTER2, 0.5))
    res = cb.harmonic_capacity(F, disk64)
    d = res.to_json()
    assert set(d) == {"value", "iterations", "residual", "p"}
