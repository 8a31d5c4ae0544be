"""The star-shaped domain family: unit ball minus a grating of thin
outward-opening cones, demonstrating that the fundamental eigenvalue (and
hence the isocapacitary constant) grows while the surface/volume ratio
stays near the dimension.

Geometry conventions: cone j has vertex at distance c0/N along the unit
direction w_j, opens away from the origin with full aperture ``eps`` (half
angle eps/2).  Every point of such a cone makes an angle at most eps/2 with
its axis, which gives an exact angular prefilter for the node masking.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .capacity import sphere_surface_area
from .errors import (
    ConfigurationError,
    ResolutionTooCoarse,
    SpacingViolated,
    StarshapeFailed,
    TrendViolated,
)
from .grid import CustomMask, build_domain
from .spectral import fundamental_eigenvalue


@dataclass(frozen=True)
class OmegaNSpec:
    """Parameters of one family member."""

    N: int
    dim: int = 3
    c0: float = 4.0
    eps: float = 1e-3
    rho: float = None

    def __post_init__(self):
        if self.N < 2:
            raise ConfigurationError("need N >= 2")
        if self.eps < 0:
            raise ConfigurationError("cone opening must be >= 0")
        if self.rho is None:
            a = self.c0 / self.N
            rho = 0.25 * min(a, 1.0) * math.sin(0.5 * self.eps + 1e-9)
            object.__setattr__(self, "rho", rho)

    @property
    def vertex_distance(self):
        return self.c0 / self.N

    @property
    def half_angle(self):
        return 0.5 * self.eps


# ---------------------------------------------------------------------------
# point placement on the sphere
# ---------------------------------------------------------------------------

def _fibonacci_sphere(m):
    golden = (1 + math.sqrt(5)) / 2
    i = np.arange(m)
    z = 1 - (2 * i + 1) / m
    r = np.sqrt(np.maximum(1 - z * z, 0.0))
    phi = 2 * math.pi * i / golden
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def _hopf_lattice(m_base, m_fiber):
    """Low-discrepancy points on S^3 from a Fibonacci base times fiber."""
    base = _fibonacci_sphere(m_base)
    out = []
    for k in range(m_fiber):
        eta = 2 * math.pi * (k + 0.5) / m_fiber
        # lift each base point through the Hopf map with fiber phase eta
        x, y, z = base[:, 0], base[:, 1], base[:, 2]
        ct = np.sqrt((1 + z) / 2)
        st = np.sqrt((1 - z) / 2)
        psi = np.arctan2(y, x)
        offset = 2 * math.pi * k / (m_fiber * golden_ratio())
        q = np.stack([ct * np.cos(eta + offset),
                      ct * np.sin(eta + offset),
                      st * np.cos(psi - eta + offset),
                      st * np.sin(psi - eta + offset)], axis=-1)
        out.append(q)
    return np.concatenate(out, axis=0)


def golden_ratio():
    return (1 + math.sqrt(5)) / 2


def _nearest_neighbor_range(pts):
    m = len(pts)
    dmin, dmax = math.inf, -math.inf
    block = max(1, 2_000_000 // max(m, 1))
    for i0 in range(0, m, block):
        chunk = pts[i0:i0 + block]
        d2 = np.sum((chunk[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        for r in range(len(chunk)):
            d2[r, i0 + r] = np.inf
        nn = np.sqrt(d2.min(axis=1))
        dmin = min(dmin, float(nn.min()))
        dmax = max(dmax, float(nn.max()))
    return dmin, dmax


def sphere_points(N, dim):
    """N^{dim-1} well-separated unit vectors; returns (points, c1, c2).

    The realized band constants are measured, not assumed: the nearest
    neighbour distance of every point lies in [c1/N, c2/N].
    """
    if N < 2:
        raise ConfigurationError("need N >= 2")
    if dim == 2:
        ang = 2 * math.pi * np.arange(N) / N
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    elif dim == 3:
        pts = _fibonacci_sphere(N * N)
    elif dim == 4:
        pts = _hopf_lattice(N * N, N)
        pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
    else:
        raise ConfigurationError("sphere points provided for dim 2, 3, 4")
    dmin, dmax = _nearest_neighbor_range(pts)
    if dmin <= 0 or dmax / dmin > 6.0:
        raise SpacingViolated(
            f"nearest-neighbour spread too wide: [{dmin:.3g}, {dmax:.3g}]")
    return pts, dmin * N, dmax * N


# ---------------------------------------------------------------------------
# building the domain
# ---------------------------------------------------------------------------

def _in_any_cone(pts, vertices, axes, half_angle):
    """Boolean mask of points lying in at least one cone (exact test)."""
    flat = pts.reshape(-1, pts.shape[-1])
    out = np.zeros(len(flat), bool)
    norms = np.linalg.norm(flat, axis=-1)
    cos_a = math.cos(half_angle)
    a = np.linalg.norm(vertices[0])
    # every cone point satisfies angle(x, axis) <= half_angle and |x| >= a
    cand0 = norms >= a * cos_a
    idx0 = np.nonzero(cand0)[0]
    if idx0.size:
        x = flat[idx0]
        xn = norms[idx0]
        block = max(1, 40_000_000 // max(len(axes), 1))
        for s in range(0, len(x), block):
            xs = x[s:s + block]
            xsn = xn[s:s + block]
            dots = xs @ axes.T
            cand = dots >= xsn[:, None] * cos_a    # angular prefilter
            hit = np.zeros(len(xs), bool)
            for j in np.nonzero(cand.any(axis=0))[0]:
                rows = np.nonzero(cand[:, j])[0]
                d = xs[rows] - vertices[j]
                proj = d @ axes[j]
                inside = proj >= np.linalg.norm(d, axis=-1) * cos_a
                hit[rows] |= inside
            out[idx0[s:s + block]] = hit
    return out.reshape(pts.shape[:-1])


@dataclass
class StarshapeCertificate:
    passed: bool
    segments_checked: int
    worst_margin: float
    violating_segment: tuple = None


def build_omega_N(spec: OmegaNSpec, h, node_budget=80_000_000,
                  certificate_segments=10_000, seed=20240901,
                  check_resolution=True, certify=True):
    """Grid for B minus the cone grating, plus a sampled visibility test."""
    if check_resolution and spec.eps > 0 \
            and spec.eps * spec.vertex_distance < 2 * h * (1 - 1e-12):
        raise ResolutionTooCoarse(
            f"eps*c0/N = {spec.eps * spec.vertex_distance:.4g} < 2h = {2*h:.4g}")
    axes, c1, c2 = sphere_points(spec.N, spec.dim)
    vertices = spec.vertex_distance * axes
    alpha = spec.half_angle

    if spec.eps == 0 or spec.vertex_distance >= 1.0:
        def indicator(pts):
            return np.sum(pts * pts, axis=-1) < 1.0
    else:
        def indicator(pts):
            inside = np.sum(pts * pts, axis=-1) < 1.0
            masked = _in_any_cone(pts, vertices, axes, alpha)
            return inside & ~masked

    lo = tuple([-1.0] * spec.dim)
    hi = tuple([1.0] * spec.dim)
    grid = build_domain(CustomMask(indicator, lo, hi, tuple([0.0] * spec.dim)),
                        h, node_budget=node_budget)
    if not certify:
        return grid, StarshapeCertificate(True, 0, math.inf)
    cert = _starshape_certificate(grid, spec, vertices, axes,
                                  certificate_segments, seed)
    if not cert.passed:
        raise StarshapeFailed(
            "sampled segment leaves the domain; increase c0",
            segment=cert.violating_segment)
    return grid, cert


def _starshape_certificate(grid, spec, vertices, axes, n_segments, seed):
    rng = np.random.default_rng(seed)
    boundary_nodes = grid.coords(_boundary_adjacent(grid))
    if len(boundary_nodes) == 0:
        return StarshapeCertificate(True, 0, math.inf)
    n_x = max(1, n_segments // 50)
    xs = boundary_nodes[rng.integers(0, len(boundary_nodes), n_x)]
    ys = spec.rho * _random_ball(rng, 50, spec.dim)
    alpha = spec.half_angle
    worst = math.inf
    ts = np.linspace(0.0, 1.0, 64)[1:-1]
    checked = 0
    for y in ys:
        # sample points along all segments [y, x]
        seg = (y[None, None, :] * (1.0 - ts[None, :, None])
               + xs[:, None, :] * ts[None, :, None])
        pts = seg.reshape(-1, spec.dim)
        keep = np.sum(pts * pts, axis=-1) < (1.0 - 1e-12)
        if spec.eps > 0 and spec.vertex_distance < 1.0:
            bad = _in_any_cone(pts[keep], vertices, axes, alpha)
            if bad.any():
                k = np.nonzero(keep)[0][np.nonzero(bad)[0][0]]
                xi = k // len(ts)
                return StarshapeCertificate(
                    False, checked, 0.0,
                    (tuple(y), tuple(xs[xi])))
        checked += len(xs)
    return StarshapeCertificate(True, checked, worst)


def _boundary_adjacent(grid):
    from scipy import ndimage

    dil = ndimage.binary_dilation(
        ~grid.interior, ndimage.generate_binary_structure(grid.dim, 1))
    return grid.interior & dil


def _random_ball(rng, m, dim):
    out = np.empty((m, dim))
    k = 0
    while k < m:
        cand = rng.uniform(-1, 1, size=(2 * m, dim))
        cand = cand[np.sum(cand * cand, axis=-1) <= 1.0]
        take = min(len(cand), m - k)
        out[k:k + take] = cand[:take]
        k += take
    return out


# ---------------------------------------------------------------------------
# the analytic surface/volume ratio bound
# ---------------------------------------------------------------------------

def _cone_slant_exit(a, psi):
    """Distance from the vertex to the unit sphere along a ray at angle psi."""
    return -a * math.cos(psi) + math.sqrt(max(1 - (a * math.sin(psi)) ** 2, 0.0))


def _single_cone_geometry(a, alpha, dim):
    """(lateral area, removed sphere cap, volume) of one cone inside B."""
    if a >= 1.0 or alpha <= 0:
        return 0.0, 0.0, 0.0
    area_sub = sphere_surface_area(dim - 1)   # |S^{dim-2}|
    s_star = _cone_slant_exit(a, alpha)
    lateral = (area_sub * math.sin(alpha) ** (dim - 2)
               * s_star ** (dim - 1) / (dim - 1))
    cos_t = a + s_star * math.cos(alpha)
    theta_star = math.acos(max(min(cos_t, 1.0), -1.0))
    cap, _ = integrate.quad(lambda t: math.sin(t) ** (dim - 2), 0.0,
                            theta_star)
    cap *= area_sub
    vol, _ = integrate.quad(
        lambda psi: math.sin(psi) ** (dim - 2)
        * _cone_slant_exit(a, psi) ** dim, 0.0, alpha)
    vol *= area_sub / dim
    return lateral, cap, vol


def gamma_upper_formula(spec: OmegaNSpec):
    """Exact surface/volume ratio of the slit ball (cones assumed disjoint)."""
    n = spec.dim
    area = sphere_surface_area(n)
    vol_ball = area / n
    m = spec.N ** (n - 1)
    lateral, cap, vol = _single_cone_geometry(spec.vertex_distance,
                                              spec.half_angle, n)
    denom = vol_ball - m * vol
    if denom <= 0:
        raise ConfigurationError("cones swallow the ball volume")
    return (area - m * cap + m * lateral) / denom


def max_resolvable_opening(N, dim, c0, gamma_cap):
    """Largest eps with the analytic ratio bound at most gamma_cap."""
    def excess(eps):
        try:
            return gamma_upper_formula(OmegaNSpec(N, dim, c0, eps)) - gamma_cap
        except ConfigurationError:
            return math.inf

    if excess(1e-9) > 0:
        return 0.0
    hi = math.pi / 2
    if excess(hi) <= 0:
        return hi
    return float(optimize.brentq(excess, 1e-9, hi, xtol=1e-10))


# ---------------------------------------------------------------------------
# the trend driver
# ---------------------------------------------------------------------------

def paper_opening(N, dim):
    """Published vanishing schedules for the cone opening."""
    if dim == 3:
        return math.exp(-N)
    return float(N ** ((1.0 - dim) / (dim - 2.5)))


@dataclass
class TrendRow:
    N: int
    eps: float
    h: float
    clamped: bool
    lam: float
    gamma_upper: float
    gamma_lower_formula: float
    certificate: StarshapeCertificate

    def to_json(self):
        return {"N": self.N, "eps": self.eps, "h": self.h,
                "clamped": self.clamped, "lambda": self.lam,
                "gamma_upper": self.gamma_upper,
                "Gamma_lower": self.lam,
                "certificate_segments": self.certificate.segments_checked}


@dataclass
class TrendTable:
    rows: list
    dim: int
    schedule: str

    def to_json(self):
        return {"dim": self.dim, "schedule": self.schedule,
                "rows": [r.to_json() for r in self.rows]}

    def write_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["N", "eps", "h", "clamped", "lambda", "gamma_upper",
                         "Gamma_lower"])
            for r in self.rows:
                wr.writerow([r.N, r.eps, r.h, int(r.clamped), r.lam,
                             r.gamma_upper, r.lam])


_CONTINUATION_THRESHOLD = 6_000_000


def _prolong(coarse_grid, coarse_values, fine_grid):
    """Linear interpolation of a coarse box field onto the fine box nodes."""
    from scipy import ndimage as ndi

    dim = fine_grid.dim
    coords = []
    for ax in range(dim):
        c = (fine_grid.axis_coords(ax) - coarse_grid.origin[ax]) \
            / coarse_grid.spacing
        shape = [1] * dim
        shape[ax] = -1
        coords.append(np.broadcast_to(c.reshape(shape), fine_grid.extents))
    out = ndi.map_coordinates(coarse_values, np.stack(coords), order=1,
                              mode="nearest")
    return out


def _eigen_with_continuation(spec, grid, eigen_tol, node_budget, seed):
    """Inverse iteration, seeded from a half-resolution eigenfield on big
    grids so the fine-level solve starts next to the ground state."""
    total = int(np.prod(np.asarray(grid.extents, dtype=np.int64)))
    x0 = None
    if total > _CONTINUATION_THRESHOLD:
        coarse, _ = build_omega_N(spec, 2 * grid.spacing,
                                  node_budget=node_budget, seed=seed,
                                  check_resolution=False, certify=False)
        coarse_eig = fundamental_eigenvalue(coarse, tol=1e-4)
        x0 = _prolong(coarse, coarse_eig.eigenfield.values, grid)
    return fundamental_eigenvalue(grid, tol=eigen_tol, x0=x0).lam


def run_trend(Ns, dim=3, schedule="grid_resolvable", h=None, c0=4.0,
              gamma_margin=0.49, h_accuracy=None, node_budget=80_000_000,
              eigen_tol=1e-6, assert_trend=True, seed=20240901):
    """Eigenvalue growth against the bounded surface/volume ratio.

    grid_resolvable clamps the vanishing opening to the resolvability bound
    eps = 2 h N / c0, choosing the row spacing so the analytic ratio stays
    within ``dim + gamma_margin``; clamped rows are flagged.
    """
    if list(Ns) != sorted(Ns) or len(set(Ns)) != len(Ns):
        raise ConfigurationError("Ns must be strictly increasing")
    if schedule not in ("paper_n3", "paper_ngt3", "grid_resolvable"):
        raise ConfigurationError(f"unknown schedule {schedule!r}")
    if schedule == "paper_n3" and dim != 3:
        raise ConfigurationError("paper_n3 schedule is for dim 3")
    if schedule == "paper_ngt3" and dim <= 3:
        raise ConfigurationError("paper_ngt3 schedule is for dim > 3")
    if h_accuracy is None:
        h_accuracy = 1 / 48 if dim == 3 else 1 / 16

    gamma_cap = dim + gamma_margin
    rows = []
    for N in Ns:
        eps_paper = paper_opening(N, dim)
        if schedule == "grid_resolvable":
            if h is not None:
                h_N = h
            else:
                eps_gamma = max_resolvable_opening(N, dim, c0, gamma_cap)
                h_gamma = eps_gamma * (c0 / N) / 2.0
                h_N = min(h_accuracy, h_gamma) if h_gamma > 0 else h_accuracy
            eps_N = max(eps_paper, 2.0 * h_N * N / c0)
            clamped = eps_N > eps_paper
        else:
            h_N = h if h is not None else h_accuracy
            eps_N, clamped = eps_paper, False
        spec = OmegaNSpec(N, dim, c0, eps_N)
        grid, cert = build_omega_N(spec, h_N, node_budget=node_budget,
                                   seed=seed)
        lam = _eigen_with_continuation(spec, grid, eigen_tol, node_budget,
                                       seed)
        rows.append(TrendRow(N, eps_N, h_N, clamped, lam,
                             gamma_upper_formula(spec),
                             dim, cert))
    table = TrendTable(rows, dim, schedule)
    if assert_trend:
        lams = [r.lam for r in rows]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise TrendViolated(f"eigenvalues not strictly increasing: {lams}")
        for r in rows:
            if not (dim <= r.gamma_upper <= dim + 0.5 + 1e-9):
                raise TrendViolated(
                    f"gamma_upper {r.gamma_upper:.3f} outside "
                    f"[{dim}, {dim + 0.5}] at N={r.N}")
    return table
