import math

import numpy as np
import pytest

import capabench as cb
from capabench import isoperimetric as iso
from capabench.errors import ConfigurationError, ShapeUnsupported


@pytest.fixture(scope="module")
def disk_eigen(disk64):
    return cb.fundamental_eigenvalue(disk64)


def test_cheeger_ball3d():
    g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 32)
    br = iso.cheeger_upper(g)
    assert br.lower == pytest.approx(3.0)
    assert 3.0 <= br.upper <= 3.0 + 6 / 32
    # witness ratio is recomputable
    ratio = cb.perimeter(br.witness_set) / cb.volume(br.witness_set)
    assert ratio == pytest.approx(br.upper, rel=1e-12)


def test_cheeger_disk_dilates(disk64, disk_eigen):
    br = iso.cheeger_upper(disk64, eigenfield=disk_eigen.eigenfield)
    assert 2.0 <= br.upper <= 2.0 + 4 / 64
    assert br.lower == pytest.approx(2.0)


def test_cheeger_upper_converges_with_refinement():
    gaps = []
    for h in (1 / 16, 1 / 32):
        g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), h)
        gaps.append(abs(iso.cheeger_upper(g).upper - 3.0))
    assert gaps[1] < gaps[0]


def test_cheeger_empty_family(disk64):
    with pytest.raises(ConfigurationError):
        iso.cheeger_upper(disk64, candidates=iso.CandidateFamily())


def test_isocap_bracket_disk(disk64, disk_eigen):
    br = iso.isocap_bracket(disk64, eigen=disk_eigen)
    assert br.lower <= br.upper
    # two-sided estimate: bracket inside [lambda, 4 lambda] with slack
    assert br.upper <= 4 * br.lower * (1 + 0.05)
    # every candidate ratio dominates the eigenvalue
    for label, ratio in br.candidate_ratios:
        assert ratio >= br.lower * (1 - 0.03), label


def test_isocap_ball3d_lower_is_pi_squared():
    g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 40)
    br = iso.isocap_bracket(g)
    assert abs(br.lower - math.pi**2) / math.pi**2 < 0.02


def test_chain_gamma_sq_le_4lambda(disk64, disk_eigen):
    # computable chain: gamma_exact(ball)^2 <= 4 lambda_hat (1 + 3%)
    gamma_exact = 2.0
    assert gamma_exact**2 <= 4 * disk_eigen.lam * 1.03


def test_area_profile_disk(disk64, disk_eigen):
    rows = iso.area_minimizing_profile(
        disk64, [math.pi / 4], eigenfield=disk_eigen.eigenfield)
    v, lam_hat, label = rows[0]
    assert lam_hat == pytest.approx(math.pi, rel=0.05)


def test_area_profile_classical_bound(disk64, disk_eigen):
    vols = np.linspace(0.05, 0.9 * math.pi, 12)
    rows = iso.area_minimizing_profile(disk64, vols,
                                       eigenfield=disk_eigen.eigenfield)
    for v, lam_hat, _ in rows:
        assert lam_hat >= iso.classical_area_bound(2, v) * (1 - 0.05)


def test_area_profile_vanishes_at_zero(disk64, disk_eigen):
    rows = iso.area_minimizing_profile(disk64, [1e-3],
                                       eigenfield=disk_eigen.eigenfield)
    assert rows[0][1] <= 0.5


def test_area_profile_volume_range(disk64):
    with pytest.raises(ConfigurationError):
        iso.area_minimizing_profile(disk64, [10.0],
                                    candidates=iso.CandidateFamily())


def test_boundary_pair_halfball():
    g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 48)
    u = cb.ScalarField.from_callable(
        g, lambda p: np.clip((p[..., 2] / 0.15 + 1) / 2, 0, 1),
        boundary_trace=True)
    rep = iso.boundary_pair_check("ball3d", u)
    assert rep.ratio >= 0.9 * 8 * math.pi
    assert rep.ratio <= 8 * math.pi * 1.03
    assert rep.within_sharp


def test_boundary_pair_constant_field(disk64):
    u = cb.ScalarField.from_callable(disk64,
                                     lambda p: np.ones(p.shape[:-1]),
                                     boundary_trace=True)
    rep = iso.boundary_pair_check("disk2d", u)
    assert rep.boundary_integral == 0.0 and rep.ratio == 0.0


def test_boundary_pair_disk_cap():
    # the sharp family for the disk is small boundary caps; the half-disk
    # only reaches pi^2 < 0.9 * 4pi
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 1024)
    phi = 0.15
    c = math.cos(phi)
    sm = 0.5 * (1 - c)
    u = cb.ScalarField.from_callable(
        g, lambda p: np.clip(((p[..., 0] - c) / sm + 1) / 2, 0, 1),
        boundary_trace=True)
    rep = iso.boundary_pair_check("disk2d", u)
    assert rep.ratio >= 0.9 * 4 * math.pi
    assert rep.ratio <= 4 * math.pi * 1.03


def test_boundary_pair_halfspace_sets_saturate():
    g = cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 16)
    u = cb.ScalarField.from_callable(g, lambda p: p[..., 2],
                                     boundary_trace=True)
    for c in (-0.5, 0.0, 0.5):
        rep = iso.boundary_pair_check("ball3d", u, g=c)
        # halfspace cuts give equality in the set inequality
        assert rep.details["boundary_product"] == pytest.approx(
            0.5 * 8 * math.pi * rep.details["interface_measure"], rel=1e-12)
        assert rep.within_sharp


def test_boundary_pair_shape_guard(disk64):
    u = cb.ScalarField.from_callable(disk64, lambda p: p[..., 0],
                                     boundary_trace=True)
    with pytest.raises(ShapeUnsupported):
        iso.boundary_pair_check("ball3d", u)
    with pytest.raises(ShapeUnsupported):
        iso.boundary_pair_check("cube", u)
