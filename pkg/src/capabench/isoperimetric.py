"""Cheeger and isocapacitary brackets, area-minimizing profiles, and the
boundary-pair inequality check on the unit ball / unit disk.

The two constants are infima, so only brackets are reported: the upper side
is attained by an explicit witness set from a candidate family, the lower
side comes from registered analytic values (Cheeger) or from the eigenvalue
bound (isocapacitary).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .bessel import first_bessel_root
from .capacity import harmonic_capacity, sphere_surface_area
from .errors import ConfigurationError, ShapeUnsupported
from .grid import Ball, NodeSet, ScalarField, gradient_energy, perimeter, volume
from .spectral import fundamental_eigenvalue


@dataclass
class ConstantBracket:
    lower: float
    upper: float
    witness_set: NodeSet
    method_notes: str

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper,
                "method_notes": self.method_notes}


@dataclass
class CandidateFamily:
    """Named node sets over which the infima are scanned.

    The defaults (eigenfield superlevel sets, concentric dilates, distance
    level sets) are heuristics: they contain near-optimal sets for convex-ish
    domains but certify nothing; that caveat travels in method_notes.
    """

    items: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def add(self, label, node_set):
        if not node_set.is_empty():
            self.items.append((label, node_set))

    @classmethod
    def default(cls, omega, eigenfield=None, n_thresholds=32, n_dilates=16,
                n_distance=16):
        fam = cls()
        if eigenfield is None:
            eigenfield = fundamental_eigenvalue(omega).eigenfield
        vals = np.abs(eigenfield.values[omega.interior])
        top = vals.max()
        if top > 0:
            qs = np.concatenate([np.linspace(0.02, 0.93, max(n_thresholds - 3, 1)),
                                 [0.96, 0.98, 0.995]])
            for q in qs:
                fam.add(f"eigen-superlevel t={q:.3f}",
                        eigenfield.superlevel_set(q * top))
        if omega.spec is not None and hasattr(omega.spec, "scaled"):
            for fac in np.linspace(0.2, 0.98, n_dilates):
                try:
                    shrunk = omega.spec.scaled(float(fac))
                except ConfigurationError:
                    break
                fam.add(f"dilate {fac:.3f}",
                        NodeSet.from_indicator(omega, shrunk.inside))
        dist = ndimage.distance_transform_edt(omega.interior,
                                              sampling=omega.spacing)
        dmax = dist.max()
        if dmax > 0:
            for q in np.linspace(0.05, 0.9, n_distance):
                mask = (dist >= q * dmax) & omega.interior
                if mask.any():
                    fam.add(f"distance-level {q:.3f}", NodeSet(omega, mask))
        return fam


def _registered_cheeger_lower(omega):
    if isinstance(omega.spec, Ball):
        return omega.dim / omega.spec.radius, "gamma(ball) = n/R registered"
    return 0.0, "no analytic lower bound registered"


def cheeger_upper(omega, candidates=None, eigenfield=None):
    """Bracket for the relative-perimeter-over-volume infimum."""
    if candidates is None:
        candidates = CandidateFamily.default(omega, eigenfield=eigenfield)
    if len(candidates) == 0:
        raise ConfigurationError("candidate family is empty")
    best = None
    for label, s in candidates:
        v = volume(s)
        if v == 0:
            continue
        ratio = perimeter(s) / v
        if best is None or ratio < best[0]:
            best = (ratio, label, s)
    lower, lower_note = _registered_cheeger_lower(omega)
    notes = (f"upper: min perimeter/volume over {len(candidates)} candidates "
             f"(witness: {best[1]}); heuristic family, not a certificate. "
             f"lower: {lower_note}")
    return ConstantBracket(lower, best[0], best[2], notes)


def isocap_bracket(omega, candidates=None, eigen=None, cap_tol=1e-8):
    """Bracket for inf cap(F; Omega) / volume(F).

    Lower side: the fundamental eigenvalue (capacity ratios dominate it);
    upper side: the best candidate compactum.
    """
    if eigen is None:
        eigen = fundamental_eigenvalue(omega)
    if candidates is None:
        candidates = CandidateFamily.default(omega, eigenfield=eigen.eigenfield)
    if len(candidates) == 0:
        raise ConfigurationError("candidate family is empty")
    best = None
    ratios = []
    for label, s in candidates:
        if s.is_empty() or s.touches_boundary_layer():
            continue
        v = volume(s)
        cap = harmonic_capacity(s, omega, tol=cap_tol).value
        ratio = cap / v
        ratios.append((label, ratio))
        if best is None or ratio < best[0]:
            best = (ratio, label, s)
    if best is None:
        raise ConfigurationError("no admissible candidate for the capacity ratio")
    notes = (f"lower: fundamental eigenvalue; upper: min cap/volume over "
             f"{len(ratios)} candidates (witness: {best[1]})")
    bracket = ConstantBracket(eigen.lam, best[0], best[2], notes)
    bracket.candidate_ratios = ratios
    return bracket


def classical_area_bound(dim, v):
    """Sharp isoperimetric lower bound on boundary area at volume v."""
    area = sphere_surface_area(dim)
    return dim ** ((dim - 1) / dim) * area ** (1.0 / dim) * v ** ((dim - 1) / dim)


def area_minimizing_profile(omega, volumes, candidates=None, eigenfield=None):
    """Upper envelope of the area-minimizing function on given volumes.

    For each v, the least candidate perimeter among candidates of volume at
    least v; rows are (v, lambda_hat(v), witness label).
    """
    if candidates is None:
        candidates = CandidateFamily.default(omega, eigenfield=eigenfield)
    measured = []
    for label, s in candidates:
        if s.is_empty():
            continue
        measured.append((volume(s), perimeter(s), label))
    out = []
    vol_omega = omega.interior_volume()
    for v in volumes:
        if not (0 < v < vol_omega):
            raise ConfigurationError("profile volumes must lie in (0, m(Omega))")
        feasible = [(p, lab) for (vv, p, lab) in measured if vv >= v]
        if not feasible:
            out.append((v, math.inf, "none"))
            continue
        p, lab = min(feasible)
        out.append((v, p, lab))
    return out


# ---------------------------------------------------------------------------
# boundary-pair inequality on the unit ball / unit disk
# ---------------------------------------------------------------------------

@dataclass
class BoundaryPairReport:
    ratio: float
    sharp_constant: float
    boundary_integral: float
    gradient_l1: float
    within_sharp: bool
    details: dict

    def to_json(self):
        d = {"ratio": self.ratio, "sharp_constant": self.sharp_constant,
             "boundary_integral": self.boundary_integral,
             "gradient_l1": self.gradient_l1,
             "within_sharp": self.within_sharp}
        d.update(self.details)
        return d


def _sphere_quadrature(n_theta=128, n_phi=256):
    x, w = np.polynomial.legendre.leggauss(n_theta)   # cos(theta) nodes
    phi = (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    ct = x[:, None] * np.ones_like(phi)[None, :]
    st = np.sqrt(1 - x**2)[:, None] * np.ones_like(phi)[None, :]
    pts = np.stack([st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], ct],
                   axis=-1).reshape(-1, 3)
    weights = np.broadcast_to(w[:, None] * (2 * math.pi / n_phi),
                              (n_theta, n_phi)).ravel()
    return pts, weights


def _circle_quadrature(n=4096):
    ang = (np.arange(n) + 0.5) * (2 * math.pi / n)
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    weights = np.full(n, 2 * math.pi / n)
    return pts, weights


def _pairwise_l1_energy(values, weights):
    """sum_{i,j} w_i w_j |v_i - v_j| via sorting (exact for the node set)."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    wcum = np.concatenate([[0.0], np.cumsum(w)])[:-1]
    scum = np.concatenate([[0.0], np.cumsum(w * v)])[:-1]
    return float(2.0 * np.sum(w * (v * wcum - scum)))


def _sample_on_boundary(u: ScalarField, pts):
    if u.boundary_fn is not None:
        return np.asarray(u.boundary_fn(pts), float)
    grid = u.grid
    idx = np.rint((pts - grid.origin) / grid.spacing).astype(int)
    idx = np.clip(idx, 0, np.asarray(grid.extents) - 1)
    return u.effective_values()[tuple(idx.T)]


def boundary_pair_check(shape, u: ScalarField, g=None, tolerance=0.03,
                        n_theta=128, n_phi=256, n_circle=4096):
    """Ratio of the boundary difference double integral to the interior
    total variation, against the sharp constant (8 pi ball, 4 pi disk).

    With ``g`` (a cut height in [-1, 1] for the halfspace {x_n > g}), checks
    the set form of the inequality instead.
    """
    if shape == "ball3d":
        if u.grid.dim != 3:
            raise ShapeUnsupported("ball3d needs a 3-D field")
        pts, w = _sphere_quadrature(n_theta, n_phi)
        c_sharp = 8 * math.pi
    elif shape == "disk2d":
        if u.grid.dim != 2:
            raise ShapeUnsupported("disk2d needs a 2-D field")
        pts, w = _circle_quadrature(n_circle)
        c_sharp = 4 * math.pi
    else:
        raise ShapeUnsupported(f"unsupported shape {shape!r}")

    details = {}
    if g is not None:
        details = _halfspace_pair_measures(shape, float(g))
        lhs = details["boundary_product"]
        rhs = 0.5 * c_sharp * details["interface_measure"]
        return BoundaryPairReport(
            ratio=lhs / max(details["interface_measure"], 1e-300),
            sharp_constant=0.5 * c_sharp,
            boundary_integral=lhs,
            gradient_l1=details["interface_measure"],
            within_sharp=lhs <= rhs * (1 + tolerance),
            details=details)

    vals = _sample_on_boundary(u, pts)
    boundary_integral = _pairwise_l1_energy(vals, w)
    grad_l1 = gradient_energy(u, 1)
    ratio = boundary_integral / grad_l1 if grad_l1 > 0 else 0.0
    return BoundaryPairReport(
        ratio=ratio,
        sharp_constant=c_sharp,
        boundary_integral=boundary_integral,
        gradient_l1=grad_l1,
        within_sharp=ratio <= c_sharp * (1 + tolerance),
        details=details)


def _halfspace_pair_measures(shape, c):
    """Exact boundary measures for g = {x_n > c} inside the unit ball/disk."""
    if not (-1.0 < c < 1.0):
        raise ConfigurationError("cut height must lie in (-1, 1)")
    if shape == "ball3d":
        cap = 2 * math.pi * (1 - c)
        rest = 4 * math.pi - cap
        interface = math.pi * (1 - c * c)
    else:
        alpha = math.acos(c)
        cap = 2 * alpha
        rest = 2 * math.pi - cap
        interface = 2 * math.sqrt(1 - c * c)
    return {"boundary_cap": cap, "boundary_rest": rest,
            "interface_measure": interface, "boundary_product": cap * rest}
