import math

import numpy as np
import pytest

import capabench as cb
from capabench import levelset as ls
from capabench.errors import (
    ConfigurationError,
    DimensionUnsupported,
    FlatField,
)


@pytest.fixture(scope="module")
def ball24():
    return cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 24)


@pytest.fixture(scope="module")
def disk_eigen(disk64):
    return cb.fundamental_eigenvalue(disk64)


def test_profile_of_equilibrium_potential():
    g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 64)
    F = cb.NodeSet.from_compactum(g, cb.Ball((0.0, 0.0, 0.0), 0.5))
    res = cb.harmonic_capacity(F, g)
    prof = ls.level_profile(res.minimizer, g, k=8)
    # radial levels: cap(N_t) = cap(F)/t = exact condenser value at the
    # level radius 1/(1+t); thin-gap levels (t -> 0) are excluded since the
    # staircase error blows up when the gap is a few cells wide
    checked = 0
    for t, c in zip(prof.thresholds[1:], prof.level_caps[1:]):
        if t < 0.3:
            continue
        r_t = 1.0 / (1.0 + t)
        exact = cb.spherical_condenser_exact(r_t, 1.0, 3, 2)
        assert abs(c - exact) / exact < 0.03, t
        checked += 1
    assert checked >= 3


def test_profile_monotone(disk64, disk_eigen):
    prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=10)
    assert np.all(np.diff(prof.level_caps) <= 1e-12)
    assert np.all(np.diff(prof.level_volumes) <= 1e-12)
    assert prof.thresholds[0] == 0.0


def test_profile_zero_field(disk64):
    with pytest.raises(FlatField):
        ls.level_profile(cb.ScalarField(disk64, np.zeros(disk64.extents)),
                         disk64)


def test_profile_needs_k8(disk64, disk_eigen):
    with pytest.raises(ConfigurationError):
        ls.level_profile(disk_eigen.eigenfield, disk64, k=4)


def test_theorem1_eigenfield_sharp_2d(disk64, disk_eigen):
    prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=24)
    lhs = ls.theorem1_lhs(prof, 1.0, 2)
    rhs = cb.gradient_energy(disk_eigen.eigenfield, 2)
    assert lhs <= rhs * 1.03
    assert lhs >= 0.85 * rhs  # near-equality for the ground state


def test_theorem1_eigenfield_3d(ball24):
    eig = cb.fundamental_eigenvalue(ball24)
    prof = ls.level_profile(eig.eigenfield, ball24, k=16)
    lhs = ls.theorem1_lhs(prof, 1.0, 3)
    rhs = cb.gradient_energy(eig.eigenfield, 2)
    assert lhs <= rhs * 1.03
    assert lhs >= 0.8 * rhs


def test_theorem1_random_bumps(disk64):
    rng = np.random.default_rng(7)
    for _ in range(5):
        u = ls.random_bump(disk64, rng)
        prof = ls.level_profile(u, disk64, k=10)
        lhs = ls.theorem1_lhs(prof, 1.0, 2)
        rhs = cb.gradient_energy(u, 2)
        assert lhs <= rhs * 1.03


def test_theorem1_r_is_free_parameter(disk64, disk_eigen):
    prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=12)
    rhs = cb.gradient_energy(disk_eigen.eigenfield, 2)
    for R in (0.5, 2.0):
        assert ls.theorem1_lhs(prof, R, 2) <= rhs * 1.03


def test_theorem1_quadrature_refinement(disk64, disk_eigen):
    vals = []
    for k in (12, 24):
        prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=k)
        vals.append(ls.theorem1_lhs(prof, 1.0, 2))
    assert abs(vals[1] - vals[0]) / vals[1] < 0.02


def test_theorem1_dim_guard(disk64, disk_eigen):
    prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=8)
    with pytest.raises(DimensionUnsupported):
        ls.theorem1_lhs(prof, 1.0, 4)


def test_theorem1_needle_capacity_limit():
    # huge level capacities: the 2-D weight saturates at 1
    prof = ls.LevelProfile(np.linspace(0, 1, 9), np.full(9, 1e12),
                           np.linspace(1, 0.1, 9), 2.0)
    j0 = cb.bessel.first_bessel_root(0)
    lhs = ls.theorem1_lhs(prof, 1.0, 2)
    assert lhs == pytest.approx(math.pi * j0**2 * 1.0, rel=1e-6)


def test_theorem2_reproduces_theorem1(disk64, disk_eigen, ball24):
    prof2 = ls.level_profile(disk_eigen.eigenfield, disk64, k=16)
    M2 = ls.theorem1_weight(1.0, 2)
    assert ls.theorem2_lhs(prof2, M2, 2, 2) == pytest.approx(
        ls.theorem1_lhs(prof2, 1.0, 2), rel=1e-10)
    eig3 = cb.fundamental_eigenvalue(ball24)
    prof3 = ls.level_profile(eig3.eigenfield, ball24, k=10)
    M3 = ls.theorem1_weight(0.8, 3)
    assert ls.theorem2_lhs(prof3, M3, 2, 2) == pytest.approx(
        ls.theorem1_lhs(prof3, 0.8, 3), rel=1e-10)


def test_theorem2_constant_and_zero_weights(disk64, disk_eigen):
    prof = ls.level_profile(disk_eigen.eigenfield, disk64, k=10)
    zero = ls.WeightFunctionM(lambda s: np.zeros_like(np.asarray(s, float)))
    assert ls.theorem2_lhs(prof, zero, 2, 2) == 0.0
    const = ls.WeightFunctionM(lambda s: np.full_like(np.asarray(s, float), 2.5))
    got = ls.theorem2_lhs(prof, const, 2, 3)
    top = prof.thresholds[-1]
    assert got == pytest.approx(2.5 * top**3, rel=1e-9)


def test_theorem2_weight_certification():
    with pytest.raises(ConfigurationError):
        ls.WeightFunctionM(lambda s: np.asarray(s, float))  # increasing
    with pytest.raises(ConfigurationError):
        ls.WeightFunctionM(lambda s: -np.ones_like(np.asarray(s, float)))


def test_theorem2_premise_bank():
    M = ls.theorem1_weight(1.0, 2)
    report = ls.theorem2_premise_report(M, 2, 2, n_bank=300)
    assert report["holds"], report


def test_corollary1_classical_2d(disk64, disk_eigen):
    lhs = ls.corollary1_lhs(disk_eigen.eigenfield, disk64, 1.0)
    rhs = cb.gradient_energy(disk_eigen.eigenfield, 2)
    assert lhs <= rhs * 1.03
    # equal-volume normalization recovers the Faber-Krahn value
    from capabench.bessel import faber_krahn_reference
    ref = faber_krahn_reference(2, disk64.interior_volume())
    norm = disk_eigen.eigenfield.norm_lp(2) ** 2
    assert lhs >= ref * norm * (1 - 0.05)


def test_corollary1_random_bump_3d(ball24):
    rng = np.random.default_rng(3)
    u = ls.random_bump(ball24, rng)
    lhs = ls.corollary1_lhs(u, ball24, 1.0)
    assert lhs <= cb.gradient_energy(u, 2) * 1.03


def test_corollary1_measured_profile(disk64, disk_eigen):
    from capabench import isoperimetric as iso
    vols = np.linspace(0.05, 0.95 * math.pi, 16)
    rows = iso.area_minimizing_profile(disk64, vols,
                                       eigenfield=disk_eigen.eigenfield)
    lhs = ls.corollary1_lhs(disk_eigen.eigenfield, disk64, 1.0,
                            profile_source="measured", measured_profile=rows)
    assert lhs > 0


def test_corollary1_zero_field(disk64):
    with pytest.raises(FlatField):
        ls.corollary1_lhs(cb.ScalarField(disk64, np.zeros(disk64.extents)),
                          disk64, 1.0)


def test_psi_tent():
    g = cb.build_domain(cb.Box((-1.0,), (1.0,)), 1 / 256)
    u = cb.ScalarField.from_callable(g, lambda p: 1 - np.abs(p[..., 0]))
    pm = ls.psi_substitution(u, 2)
    # psi(t) = t/2 for the tent
    for t in (0.2, 0.5, 0.8):
        assert pm.psi(t) == pytest.approx(t / 2, abs=2e-3)
    assert pm.identity_lhs() == pytest.approx(2.0, rel=0.02)
    assert pm.energy == pytest.approx(2.0, rel=0.02)


def test_psi_radial_equilibrium():
    r = np.linspace(0.5, 1.0, 2001)
    vals = (1.0 / r - 1.0) / (1.0 / 0.5 - 1.0)
    rf = ls.RadialField(r, vals, 3)
    pm = ls.psi_substitution(rf, 2)
    cap = 4 * math.pi
    for t in (0.25, 0.5, 0.75):
        assert pm.psi(t) == pytest.approx(t / cap, rel=5e-3)
    assert pm.identity_lhs() == pytest.approx(cap, rel=0.02)


def test_psi_zero_field():
    g = cb.build_domain(cb.Box((-1.0,), (1.0,)), 1 / 64)
    with pytest.raises(FlatField):
        ls.psi_substitution(cb.ScalarField(g, np.zeros(g.extents)), 2)
