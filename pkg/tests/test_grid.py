import math

import numpy as np
import pytest

import capabench as cb
from capabench.errors import BudgetExceeded, ConfigurationError, EmptyDomain


def test_disk_node_count_and_volume():
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 32)
    expected = math.pi / (1 / 32) ** 2
    assert abs(g.interior_count - expected) / expected < 2 / 32
    s = g.all_interior()
    assert abs(cb.volume(s) - math.pi) / math.pi <= 2 / 32


def test_box_interior_count_cell_centered():
    g = cb.build_domain(cb.Box((0.0, 0.0), (1.0, 1.0)), 1 / 10)
    assert g.interior_count == 81  # 9 x 9: lattice nodes strictly inside


def test_empty_domain():
    with pytest.raises(EmptyDomain):
        cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 10.0)


def test_node_budget():
    with pytest.raises(BudgetExceeded):
        cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 64, node_budget=1000)


def test_volume_empty_and_monotone(square64):
    s0 = cb.NodeSet.empty(square64)
    assert cb.volume(s0) == 0.0
    half = cb.NodeSet.from_indicator(square64, lambda p: p[..., 0] < 0.5)
    full = square64.all_interior()
    assert cb.volume(half) <= cb.volume(full)


def test_unit_square_volume_tolerance(square64):
    v = cb.volume(square64.all_interior())
    assert abs(v - 1.0) <= 2 / 64


def test_perimeter_axis_aligned_exact(square64):
    # exact for the union of member cells: (n-1) faces of length h per side
    s = square64.all_interior()
    per = cb.perimeter(s)
    side_nodes = round(math.sqrt(s.count))
    assert per == pytest.approx(4 * side_nodes * square64.spacing, rel=1e-12)


def test_perimeter_disk_corrected():
    g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 128)
    per = cb.perimeter(g.all_interior())
    assert abs(per - 2 * math.pi) / (2 * math.pi) < 0.03


def test_perimeter_empty(square64):
    assert cb.perimeter(cb.NodeSet.empty(square64)) == 0.0


def test_measures_invariant_under_translation_and_axis_permutation():
    # whole-cell translation: anchored lattices give identical staircases
    ga = cb.build_domain(cb.Ball((0.0, 0.0), 0.8), 1 / 48)
    gb = cb.build_domain(cb.Ball((5.0, -3.0), 0.8), 1 / 48)
    assert cb.volume(ga.all_interior()) == pytest.approx(
        cb.volume(gb.all_interior()), rel=1e-12)
    assert cb.perimeter(ga.all_interior()) == pytest.approx(
        cb.perimeter(gb.all_interior()), rel=1e-12)
    # axis permutation
    g1 = cb.build_domain(cb.Box((0.0, 0.0), (2.0, 1.0)), 1 / 16)
    g2 = cb.build_domain(cb.Box((0.0, 0.0), (1.0, 2.0)), 1 / 16)
    assert cb.volume(g1.all_interior()) == pytest.approx(
        cb.volume(g2.all_interior()), rel=1e-12)
    assert cb.perimeter(g1.all_interior()) == pytest.approx(
        cb.perimeter(g2.all_interior()), rel=1e-12)


def test_gradient_energy_linear_trace_extended(square64):
    u = cb.ScalarField.from_callable(square64, lambda p: p[..., 0],
                                     boundary_trace=True)
    e = cb.gradient_energy(u, 2)
    assert e == pytest.approx(1.0, abs=1e-12)


def test_gradient_energy_product_sine(square64):
    u = cb.ScalarField.from_callable(
        square64,
        lambda p: np.sin(np.pi * p[..., 0]) * np.sin(np.pi * p[..., 1]))
    e = cb.gradient_energy(u, 2)
    assert abs(e - math.pi**2 / 2) / (math.pi**2 / 2) < 0.01


def test_gradient_energy_zero(square64):
    u = cb.ScalarField(square64, np.zeros(square64.extents))
    assert cb.gradient_energy(u, 2) == 0.0


def test_gradient_energy_homogeneity(square64):
    u = cb.ScalarField.from_callable(
        square64,
        lambda p: np.sin(np.pi * p[..., 0]) * np.sin(2 * np.pi * p[..., 1]))
    for p in (1.0, 2.0, 3.0):
        e1 = cb.gradient_energy(u, p)
        e2 = cb.gradient_energy(u.scaled(-2.5), p)
        assert e2 == pytest.approx(2.5**p * e1, rel=1e-12)


def test_refinement_volume_error_halves():
    errs = []
    for h in (1 / 16, 1 / 32):
        g = cb.build_domain(cb.Ball((0.0, 0.0), 1.0), h)
        errs.append(abs(cb.volume(g.all_interior()) - math.pi))
    assert errs[1] < 0.75 * errs[0]


def test_field_rejects_nan(square64):
    vals = np.zeros(square64.extents)
    vals[tuple(np.argwhere(square64.interior)[0])] = np.nan
    with pytest.raises(ConfigurationError):
        cb.ScalarField(square64, vals)


def test_nodeset_requires_interior(square64):
    mask = np.ones(square64.extents, bool)
    with pytest.raises(ConfigurationError):
        cb.NodeSet(square64, mask)


def test_grid_export_roundtrip(tmp_path, square64):
    square64.export(tmp_path / "g")
    g2 = cb.grid.load_grid(tmp_path / "g")
    assert g2.dim == 2
    assert g2.interior_count == square64.interior_count
    assert np.array_equal(g2.node_class, square64.node_class)
