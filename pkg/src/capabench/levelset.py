"""Level-set capacitary integrals and the co-area substitution.

A LevelProfile collects capacities and volumes of the superlevel sets
N_t = {|u| >= t}; the integral checkers evaluate the capacitary lower
bounds for the Dirichlet energy as Stieltjes sums over the profile
(midpoint rule on the t^q increments, integrand at averaged capacity).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .bessel import first_bessel_root
from .capacity import harmonic_capacity, p_capacity, sphere_surface_area
from .errors import (
    ConfigurationError,
    DegenerateLevels,
    DimensionUnsupported,
    FlatField,
)
from .grid import ScalarField, gradient_energy, volume
from .isoperimetric import classical_area_bound


@dataclass
class LevelProfile:
    thresholds: np.ndarray       # increasing, t_0 = 0 is the support level
    level_caps: np.ndarray
    level_volumes: np.ndarray
    p: float

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, float)
        self.level_caps = np.asarray(self.level_caps, float)
        self.level_volumes = np.asarray(self.level_volumes, float)


def level_profile(u: ScalarField, omega, p=2.0, k=12, cap_tol=1e-8,
                  monotone_slack=0.05):
    """Capacities and volumes of k+1 superlevel sets of |u|.

    Thresholds are quantiles of the positive range of |u| (t_0 = 0 is the
    support); exact plateau values are nudged off by half a quantile step.
    """
    if k < 8:
        raise ConfigurationError("need at least 8 thresholds")
    vals = np.abs(u.values[u.grid.interior])
    top = float(vals.max()) if vals.size else 0.0
    if top == 0.0:
        raise FlatField("level profile of the zero field")
    pos = vals[vals > 0]
    qs = np.linspace(0.0, 1.0, k + 1)[1:]
    raw = np.quantile(pos, qs)
    raw[-1] = top
    uniq, counts = np.unique(pos, return_counts=True)
    plateau_vals = set(uniq[counts > max(16, 0.01 * pos.size)])
    # strictly increasing thresholds; interior ones nudged off plateaus by
    # half a step (the top level keeps the max so N_top is the plateau set)
    thresholds = [0.0]
    for v in raw:
        if v in plateau_vals and v < top:
            v = v - 0.5 * (v - thresholds[-1])
        if v > thresholds[-1]:
            thresholds.append(float(v))
    thresholds = np.asarray(thresholds)

    caps = np.empty(len(thresholds))
    vols = np.empty(len(thresholds))
    x0 = None
    for j, t in enumerate(thresholds):
        nt = u.superlevel_set(t)
        vols[j] = volume(nt)
        if nt.is_empty():
            caps[j] = 0.0
            continue
        if p == 2:
            res = harmonic_capacity(nt, omega, tol=cap_tol, x0=x0,
                                    allow_boundary_touch=True)
            x0 = res.minimizer.values
        else:
            res = p_capacity(nt, omega, p, tol=cap_tol,
                             allow_boundary_touch=True)
        caps[j] = res.value

    # solver jitter may break monotonicity marginally; clip within slack
    for j in range(1, len(caps)):
        if caps[j] > caps[j - 1] * (1 + monotone_slack):
            raise DegenerateLevels(
                f"level capacity increased by more than {monotone_slack:.0%} "
                f"at threshold {thresholds[j]:.3g}")
    caps = np.minimum.accumulate(caps)
    vols = np.minimum.accumulate(vols)
    return LevelProfile(thresholds, caps, vols, p)


def _bins(profile, q):
    t = profile.thresholds
    mid_caps = 0.5 * (profile.level_caps[:-1] + profile.level_caps[1:])
    dtq = t[1:] ** q - t[:-1] ** q
    return mid_caps, dtq


def theorem1_lhs(profile: LevelProfile, R, dim):
    """Capacitary lower-bound integral for the Dirichlet 2-energy.

    dim 3: (j_{1/2}/R)^2 m(B_R) Int (cap(N_t)/(cap(B_R)+cap(N_t)))^3 d(t^2);
    dim 2: pi j_0^2 Int exp(-4 pi / cap(N_t)) d(t^2).
    """
    if profile.p != 2:
        raise ConfigurationError("theorem1_lhs needs a p = 2 profile")
    if dim == 3:
        j = first_bessel_root(1)
        cap_ball = sphere_surface_area(3) * R     # (n-2)|S^{n-1}| R^{n-2}
        vol_ball = sphere_surface_area(3) / 3.0 * R**3
        mid_caps, dt2 = _bins(profile, 2)
        frac = np.where(mid_caps > 0, mid_caps / (cap_ball + mid_caps), 0.0)
        return float((j / R) ** 2 * vol_ball * np.sum(frac**3 * dt2))
    if dim == 2:
        j0 = first_bessel_root(0)
        mid_caps, dt2 = _bins(profile, 2)
        weight = np.where(mid_caps > 0, np.exp(-4 * math.pi / mid_caps), 0.0)
        return float(math.pi * j0**2 * np.sum(weight * dt2))
    raise DimensionUnsupported("theorem1_lhs supports dim 2 and 3")


class WeightFunctionM:
    """Non-increasing nonnegative weight, certified on samples."""

    def __init__(self, fn, certify_on=None):
        self.fn = fn
        pts = certify_on if certify_on is not None else np.logspace(-6, 6, 200)
        vals = self._eval(pts)
        if np.any(vals < -1e-12):
            raise ConfigurationError("weight function must be nonnegative")
        if np.any(np.diff(vals) > 1e-12 * max(1.0, float(np.max(np.abs(vals))))):
            raise ConfigurationError("weight function must be non-increasing")

    def _eval(self, x):
        x = np.asarray(x, float)
        with np.errstate(over="ignore", under="ignore"):
            return np.asarray(self.fn(x), float)

    def __call__(self, x):
        return self._eval(x)


def theorem2_lhs(profile: LevelProfile, M: WeightFunctionM, p, q):
    """Int M(cap_p(N_t)^{1/(1-p)}) d(t^q) over the profile."""
    if p <= 1 or q <= 0:
        raise ConfigurationError("need p > 1 and q > 0")
    mid_caps, dtq = _bins(profile, q)
    with np.errstate(divide="ignore"):
        sigma = np.where(mid_caps > 0, mid_caps ** (1.0 / (1.0 - p)), np.inf)
    return float(np.sum(M(sigma) * dtq))


def theorem2_premise_report(M: WeightFunctionM, p, q, n_bank=1000, n_knots=24,
                            seed=1234):
    """Numerical check of the 1-D weight premise on random profiles.

    Tests (-Int |t|^q dM)^{1/q} <= (Int |t'|^p dpsi)^{1/p} over a bank of
    random nondecreasing piecewise-linear t(psi) with t(0) = 0.
    """
    rng = np.random.default_rng(seed)
    worst = -np.inf
    failures = 0
    for _ in range(n_bank):
        width = 10.0 ** rng.uniform(-2, 2)
        psi = np.sort(rng.uniform(0, width, n_knots))
        psi[0] = 0.0
        t = np.cumsum(rng.uniform(0, 1, n_knots))
        t[0] = 0.0
        # dense evaluation grid: the weights may decay much faster than the
        # knot spacing, so -int |t|^q dM needs sub-knot resolution
        fine = np.unique(np.concatenate(
            [psi, np.linspace(0, psi[-1], 2000),
             np.logspace(-6, np.log10(max(psi[-1], 1e-5)), 200)]))
        tf = np.interp(fine, psi, t)
        mvals = M(fine)
        dM = np.diff(mvals)
        lhs_q = float(np.sum((0.5 * (tf[:-1] + tf[1:])) ** q * (-dM)))
        # tail: t constant past the last knot, M keeps decaying to M(inf)
        m_inf = float(M(np.asarray([1e12]))[0])
        lhs_q += t[-1] ** q * max(float(mvals[-1]) - m_inf, 0.0)
        lhs = lhs_q ** (1.0 / q) if lhs_q > 0 else 0.0
        dpsi = np.diff(psi)
        ok = dpsi > 0
        rhs_p = float(np.sum(np.abs(np.diff(t)[ok] / dpsi[ok]) ** p * dpsi[ok]))
        rhs = rhs_p ** (1.0 / p)
        margin = lhs / rhs if rhs > 0 else np.inf
        worst = max(worst, margin)
        if margin > 1.0 + 1e-9:
            failures += 1
    return {"bank_size": n_bank, "failures": failures, "worst_ratio": worst,
            "holds": failures == 0}


def theorem1_weight(R, dim):
    """The weight that reduces the general integral to the dim-specific one."""
    if dim == 3:
        j = first_bessel_root(1)
        area = sphere_surface_area(3)

        def fn(sig):
            return (area / 3.0) * (j / R) ** 2 * (
                area * np.asarray(sig) + 1.0 / R) ** (-3.0)
        return WeightFunctionM(fn)
    if dim == 2:
        j0 = first_bessel_root(0)

        def fn(sig):
            return math.pi * j0**2 * np.exp(-4 * math.pi * np.asarray(sig))
        return WeightFunctionM(fn)
    raise DimensionUnsupported("weights provided for dim 2 and 3")


# ---------------------------------------------------------------------------
# area-minimizing-function variant
# ---------------------------------------------------------------------------

def _classical_lambda_integral(a, b, dim, pprime=2.0):
    """Int_a^b dv / lambda(v)^pprime with the sharp isoperimetric lambda."""
    if a <= 0:
        return math.inf
    if b <= a:
        return 0.0
    c = classical_area_bound(dim, 1.0)  # lambda(v) = c v^{(n-1)/n}
    expo = pprime * (dim - 1) / dim
    if abs(expo - 1.0) < 1e-14:
        return math.log(b / a) / c**pprime
    return (b ** (1 - expo) - a ** (1 - expo)) / ((1 - expo) * c**pprime)


def volume_profile(u: ScalarField, k=64):
    vals = np.abs(u.values[u.grid.interior])
    top = float(vals.max()) if vals.size else 0.0
    if top == 0.0:
        raise FlatField("volume profile of the zero field")
    pos = vals[vals > 0]
    thresholds = np.concatenate(
        [[0.0], np.quantile(pos, np.linspace(0, 1, k + 1)[1:])])
    hn = u.grid.spacing**u.grid.dim
    vols = np.array([np.count_nonzero(pos >= t) * hn for t in thresholds])
    return thresholds, vols


def corollary1_lhs(u: ScalarField, omega, R, profile_source="classical",
                   k=64, measured_profile=None):
    """Area-minimizing-function form of the capacitary energy bound.

    ``classical`` uses the sharp isoperimetric lower bound for the area
    function (conservative direction); ``measured`` interpolates a profile
    of (volume, area) pairs, e.g. from area_minimizing_profile.
    """
    dim = omega.dim
    if dim not in (2, 3):
        raise DimensionUnsupported("corollary1_lhs supports dim 2 and 3")
    thresholds, vols = volume_profile(u, k=k)
    m_omega = omega.interior_volume()
    mid_vols = 0.5 * (vols[:-1] + vols[1:])
    dt2 = thresholds[1:] ** 2 - thresholds[:-1] ** 2

    if profile_source == "classical":
        integrals = np.array([
            _classical_lambda_integral(a, m_omega, dim) for a in mid_vols])
    elif profile_source == "measured":
        if measured_profile is None:
            raise ConfigurationError("measured profile rows required")
        pv = np.array([row[0] for row in measured_profile])
        pl = np.array([row[1] for row in measured_profile])
        order = np.argsort(pv)
        pv, pl = pv[order], pl[order]

        def lam(v):
            return np.interp(v, pv, pl)

        integrals = []
        for a in mid_vols:
            if a <= 0:
                integrals.append(math.inf)
                continue
            vv = np.linspace(a, m_omega, 200)
            integrals.append(float(np.trapz(1.0 / lam(vv) ** 2, vv)))
        integrals = np.array(integrals)
    else:
        raise ConfigurationError(f"unknown profile source {profile_source!r}")

    if dim == 2:
        j0 = first_bessel_root(0)
        weight = np.exp(-4 * math.pi * integrals)
        return float(math.pi * j0**2 * np.sum(weight * dt2))
    j = first_bessel_root(1)
    cap_ball = sphere_surface_area(3) * R
    vol_ball = sphere_surface_area(3) / 3.0 * R**3
    weight = (cap_ball * integrals + 1.0) ** (-3.0)
    return float((j / R) ** 2 * vol_ball * np.sum(weight * dt2))


# ---------------------------------------------------------------------------
# co-area substitution for 1-D and radial fields
# ---------------------------------------------------------------------------

def random_bump(omega, rng, n_bumps=3, cutoff_frac=0.3):
    """Random smooth compactly-supported test field on the domain.

    Sum of Gaussians of either sign times a smooth cutoff that is 1 in the
    bulk and decays to zero at the boundary layer.
    """
    dist = ndimage.distance_transform_edt(omega.interior,
                                          sampling=omega.spacing)
    dmax = float(dist.max())
    cutoff = np.sin(0.5 * np.pi * np.clip(dist / (cutoff_frac * dmax), 0, 1)) ** 2
    pts = np.stack(np.broadcast_arrays(*omega.meshgrid()), axis=-1)
    inner = omega.coords(dist >= 0.35 * dmax)
    u = np.zeros(omega.extents)
    for _ in range(n_bumps):
        center = inner[rng.integers(len(inner))]
        width = (0.1 + 0.3 * rng.random()) * dmax
        amp = rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
        r2 = np.sum((pts - center) ** 2, axis=-1)
        u += amp * np.exp(-r2 / (2 * width**2))
    return ScalarField(omega, u * cutoff * omega.interior)


@dataclass
class RadialField:
    """Monotone-friendly radial profile u(r) on [0, r_max] in dimension n."""

    r: np.ndarray
    values: np.ndarray
    dim: int


@dataclass
class PsiMap:
    t_grid: np.ndarray
    psi_grid: np.ndarray
    p: float
    energy: float        # Int |grad u|^p over the carrier

    def psi(self, t):
        return np.interp(t, self.t_grid, self.psi_grid)

    def t_of_psi(self, psi):
        return np.interp(psi, self.psi_grid, self.t_grid)

    def identity_lhs(self):
        """Int |t'(psi)|^p dpsi via the inverse map."""
        dpsi = np.diff(self.psi_grid)
        dt = np.diff(self.t_grid)
        ok = dpsi > 0
        return float(np.sum(np.abs(dt[ok] / dpsi[ok]) ** self.p * dpsi[ok]))


def _crossing_weight(x, vals, tau, p, radial_dim=None):
    """Sum over {|u| = tau} of |u'|^{p-1} (times sphere area for radial)."""
    a = np.abs(vals)
    total = 0.0
    for i in range(len(x) - 1):
        lo, hi = a[i], a[i + 1]
        if lo == hi:
            continue
        if min(lo, hi) < tau <= max(lo, hi):
            slope = abs((vals[i + 1] - vals[i]) / (x[i + 1] - x[i]))
            w = slope ** (p - 1.0)
            if radial_dim is not None:
                # linear interpolation of the crossing radius
                frac = (tau - lo) / (hi - lo)
                rc = x[i] + frac * (x[i + 1] - x[i])
                w *= sphere_surface_area(radial_dim) * rc ** (radial_dim - 1)
            total += w
    return total


def psi_substitution(u, p=2.0, n_tau=2000):
    """The co-area reparametrization psi(t) and its inverse.

    ``u`` is a 1-D ScalarField or a RadialField; plateau levels carry no
    gradient mass and are skipped per the co-area convention.
    """
    if isinstance(u, RadialField):
        x = np.asarray(u.r, float)
        vals = np.asarray(u.values, float)
        radial_dim = u.dim
        mid = 0.5 * (x[:-1] + x[1:])
        geom = sphere_surface_area(radial_dim) * mid ** (radial_dim - 1)
        slopes = np.diff(vals) / np.diff(x)
        energy = float(np.sum(np.abs(slopes) ** p * geom * np.diff(x)))
    elif isinstance(u, ScalarField):
        if u.grid.dim != 1:
            raise ConfigurationError(
                "psi_substitution needs a 1-D field or a RadialField")
        x = u.grid.axis_coords(0)
        vals = u.values.copy()
        radial_dim = None
        energy = gradient_energy(u, p)
    else:
        raise ConfigurationError("unsupported field type")

    if p <= 1:
        raise ConfigurationError("psi substitution needs p > 1")
    top = float(np.max(np.abs(vals)))
    if top == 0.0:
        raise FlatField("psi substitution of the zero field")

    taus = np.linspace(0.0, top, n_tau + 1)[1:]
    weights = np.array(
        [_crossing_weight(x, vals, tau, p, radial_dim) for tau in taus])
    dead = weights <= 0
    if np.count_nonzero(dead[:-1]) > 0.5 * (len(taus) - 1):
        raise DegenerateLevels("most levels carry no gradient mass")
    if np.any(dead[:-1]):
        # interior plateau levels: skipped (no gradient mass on the level)
        weights = np.where(dead, np.inf, weights)
    integrand = weights ** (-1.0 / (p - 1.0))
    dtau = taus[1] - taus[0]
    psi_vals = np.concatenate([[0.0], np.cumsum(integrand * dtau)])
    t_grid = np.concatenate([[0.0], taus])
    return PsiMap(t_grid, psi_vals, p, energy)
