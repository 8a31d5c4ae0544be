"""Measure criteria for difference-seminorm inequalities.

Interval criteria (the factor-2 interior rule and its endpoint variant, and
the three-family (I, J) test for the gradient p-norm), the ball criterion on
R^n, the grid isoperimetric form, the marginal-case constants S and K with
their energy bound, the sharpness check for the K-condition, and a brute
force ratio maximizer used as an independent oracle.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .capacity import sphere_surface_area
from .errors import (
    ConfigurationError,
    QuadratureUnstable,
    SearchBudgetExceeded,
)
from .grid import ScalarField, perimeter, volume
from .measures import Interval, NuFunction, ProductMeasure1D

INF = float("inf")


@dataclass
class CriterionReport:
    sup_value: float
    witness: dict
    implied_constant: float
    grid_resolution: dict

    def to_json(self):
        return {"sup_value": self.sup_value, "witness": self.witness,
                "implied_constant": self.implied_constant,
                "grid_resolution": self.grid_resolution}


# ---------------------------------------------------------------------------
# the difference seminorm
# ---------------------------------------------------------------------------

def _as_knots(u):
    if isinstance(u, ScalarField):
        if u.grid.dim != 1:
            raise ConfigurationError("seminorm expects 1-D samples")
        return u.grid.axis_coords(0), u.values
    x, vals = u
    return np.asarray(x, float), np.asarray(vals, float)


def seminorm(u, mu: ProductMeasure1D, q):
    """<u>_{q,mu} for piecewise-linear u; +inf flag when divergence is known.

    For power kernels |x-y|^{-s} with no diagonal cutoff the integral
    diverges whenever q - s <= -1 and u is non-constant; that case returns
    inf rather than raising.
    """
    if q < 1:
        raise ConfigurationError("need q >= 1")
    x, vals = _as_knots(u)
    if np.all(vals == vals[0]):
        atoms_only = sum(
            mass * abs(np.interp(ax, x, vals) - np.interp(ay, x, vals)) ** q
            for (ax, ay), mass in mu.atoms)
        return atoms_only ** (1.0 / q)
    if (mu.kernel is not None and mu.kernel[0] == "power"
            and mu.diagonal_cutoff == 0.0):
        s = mu.kernel[1]
        if q - s <= -1.0:
            return INF
    total = mu.seminorm_integrand(x, vals, q)
    return float(total) ** (1.0 / q)


# ---------------------------------------------------------------------------
# interval searches
# ---------------------------------------------------------------------------

def _geometric_scales(span, ratio=1.25, smallest=None):
    if smallest is None:
        smallest = span / 4096.0
    out = []
    v = smallest
    while v < span:
        out.append(v)
        v *= ratio
    out.append(span)
    return np.asarray(out)


def corollary3_sup(mu: ProductMeasure1D, q, n_x=256, ratio=1.25,
                   budget=4_000_000):
    """Least constant consistent with the interval criteria.

    Interior intervals carry the factor-2 rule; intervals touching an end
    point carry the bare rule.  Both symmetric measure terms are summed.
    """
    if q < 1:
        raise ConfigurationError("need q >= 1")
    wlo, whi = mu.window
    span = whi - wlo
    omega = Interval(wlo, whi)
    evaluations = 0
    best_int = (0.0, None)
    xs = np.linspace(wlo, whi, n_x + 2)[1:-1]
    ds = _geometric_scales(span / 2, ratio)
    for x in xs:
        for d in ds:
            I = Interval(max(x - d, wlo), min(x + d, whi))
            if I.length <= 0:
                continue
            m = _two_sided_complement_measure(mu, omega, I)
            evaluations += 1
            if evaluations > budget:
                raise SearchBudgetExceeded("interval budget exhausted")
            val = m ** (1.0 / q)
            if val > best_int[0]:
                best_int = (val, {"family": "interior", "x": float(x),
                                  "d": float(d)})
    best_end = (0.0, None)
    for r in _geometric_scales(span, ratio):
        for fam, I in (("left", Interval(wlo, min(wlo + r, whi))),
                       ("right", Interval(max(whi - r, wlo), whi))):
            m = _two_sided_complement_measure(mu, omega, I)
            evaluations += 1
            val = m ** (1.0 / q)
            if val > best_end[0]:
                best_end = (val, {"family": f"endpoint-{fam}",
                                  "r": float(r)})
    c_int = best_int[0] / 2.0
    c_end = best_end[0]
    if c_int >= c_end:
        implied, witness = c_int, best_int[1]
    else:
        implied, witness = c_end, best_end[1]
    sup_value = max(best_int[0], best_end[0])
    return CriterionReport(sup_value, witness or {}, implied,
                           {"n_x": n_x, "ratio": ratio,
                            "evaluations": evaluations})


def _two_sided_complement_measure(mu, omega, I):
    total = 0.0
    for piece in _omega_minus(omega, I):
        total += mu.measure(I, piece) + mu.measure(piece, I)
    return total


def _omega_minus(omega, cut):
    parts = []
    if cut.lo > omega.lo:
        parts.append(Interval(omega.lo, cut.lo))
    if cut.hi < omega.hi:
        parts.append(Interval(cut.hi, omega.hi))
    return parts


def corollary5_check(mu: ProductMeasure1D, p, q, n_x=256, ratio=1.25,
                     budget=4_000_000):
    """sup over the three (I, J) families of r^{(p-1)/p} mu(I, Omega\\J)^{1/q}.

    p = q is accepted as a diagnostic mode (the sup stays informative even
    though the criterion is then only necessary).
    """
    if not p > 1:
        raise ConfigurationError("need p > 1")
    if q < p:
        raise ConfigurationError("need q >= p")
    wlo, whi = mu.window
    span = whi - wlo
    omega = Interval(wlo, whi)
    expo = (p - 1.0) / p
    best = (0.0, None)
    evaluations = 0
    xs = np.linspace(wlo, whi, n_x + 2)[1:-1]
    scales = _geometric_scales(span, ratio)
    for x in xs:
        for d in scales[scales < span / 2]:
            I = Interval(max(x - d, wlo), min(x + d, whi))
            for r in scales:
                jlo, jhi = x - d - r, x + d + r
                if jlo < wlo or jhi > whi:
                    continue
                m = sum(mu.measure(I, piece)
                        for piece in _omega_minus(omega, Interval(jlo, jhi)))
                evaluations += 1
                if evaluations > budget:
                    raise SearchBudgetExceeded("interval budget exhausted")
                val = r**expo * m ** (1.0 / q)
                if val > best[0]:
                    best = (val, {"family": "interior", "x": float(x),
                                  "d": float(d), "r": float(r)})
    for x in xs:
        for r in scales:
            # left endpoint family: I = (alpha, x], J = (alpha, x + r)
            if x + r <= whi:
                I = Interval(wlo, x)
                m = mu.measure(I, Interval(x + r, whi))
                val = r**expo * m ** (1.0 / q)
                evaluations += 1
                if val > best[0]:
                    best = (val, {"family": "endpoint-left", "x": float(x),
                                  "r": float(r)})
            if x - r >= wlo:
                I = Interval(x, whi)
                m = mu.measure(I, Interval(wlo, x - r))
                val = r**expo * m ** (1.0 / q)
                evaluations += 1
                if val > best[0]:
                    best = (val, {"family": "endpoint-right", "x": float(x),
                                  "r": float(r)})
    return CriterionReport(best[0], best[1] or {}, best[0],
                           {"n_x": n_x, "ratio": ratio,
                            "evaluations": evaluations})


# ---------------------------------------------------------------------------
# ball criterion on R^n
# ---------------------------------------------------------------------------

def _lens_complement_area(s, rho, dim):
    """vol(B(0,rho) minus B(w,rho)) for |w| = s."""
    if s >= 2 * rho:
        return _ball_volume(rho, dim)
    if dim == 2:
        overlap = (2 * rho**2 * math.acos(s / (2 * rho))
                   - 0.5 * s * math.sqrt(max(4 * rho**2 - s**2, 0.0)))
        return math.pi * rho**2 - overlap
    if dim == 3:
        overlap = math.pi * (2 * rho + s) * (2 * rho - s) ** 2 / 12.0
        return 4.0 / 3.0 * math.pi * rho**3 - overlap
    raise ConfigurationError("ball criterion provided for dim 2 and 3")


def _ball_volume(rho, dim):
    return sphere_surface_area(dim) / dim * rho**dim


def corollary4_ball_sup(kernel, q, samples, dim, cutoff=0.0,
                        mc_budget=200_000, seed=7, rel_var_cap=0.10):
    """sup over (x, rho) of rho^{(1-n)q} (mu(B, B^c) + mu(B^c, B)).

    ``kernel`` is ("power", s, c) or a radial callable f(s) for translation
    invariant densities (radial product quadrature); a callable f(x, y) on
    point arrays triggers Monte-Carlo with a variance guard.
    """
    if q < 1:
        raise ConfigurationError("need q >= 1")
    best = (0.0, None)
    values = []
    rng = np.random.default_rng(seed)
    for x, rho in samples:
        if _is_radial_kernel(kernel):
            m = _radial_ball_complement(kernel, rho, dim, cutoff)
            two_sided = 2.0 * m
        else:
            m, rel = _mc_ball_complement(kernel, np.asarray(x, float), rho,
                                         dim, cutoff, mc_budget, rng)
            if rel > rel_var_cap:
                raise QuadratureUnstable(
                    f"Monte-Carlo variance {rel:.1%} above {rel_var_cap:.0%}")
            two_sided = 2.0 * m
        val = rho ** ((1 - dim) * q) * two_sided
        values.append({"x": list(np.atleast_1d(np.asarray(x, float))),
                       "rho": rho, "value": val})
        if val > best[0]:
            best = (val, values[-1])
    sup = best[0]
    necessity_lower = sphere_surface_area(dim) ** (-1.0) * sup ** (1.0 / q)
    report = CriterionReport(sup, best[1] or {}, necessity_lower,
                             {"samples": len(values), "cutoff": cutoff})
    report.sample_values = values
    return report


def _is_radial_kernel(kernel):
    return (isinstance(kernel, tuple) and kernel[0] == "power") or (
        callable(kernel) and getattr(kernel, "radial", False))


def _radial_ball_complement(kernel, rho, dim, cutoff):
    if isinstance(kernel, tuple):
        _, s, c = kernel

        def f(t):
            return c * t ** (-s)
    else:
        f = kernel
    area = sphere_surface_area(dim)
    lo = max(cutoff, 1e-12)

    def integrand(t):
        return f(t) * _lens_complement_area(t, rho, dim) * t ** (dim - 1)

    upper = 16.0 * rho + 16.0
    val, _ = integrate.quad(integrand, lo, 2 * rho, limit=200)
    tail, _ = integrate.quad(integrand, 2 * rho, upper, limit=200)
    far, _ = integrate.quad(
        lambda t: f(t) * _ball_volume(rho, dim) * t ** (dim - 1),
        upper, np.inf, limit=200)
    return area * (val + tail + far)


def _mc_ball_complement(density, x, rho, dim, cutoff, budget, rng):
    """Monte-Carlo mu(B(x,rho) x B^c) over a truncation shell of 8 rho."""
    shell = 8.0
    u = x + rho * _unit_ball_samples(rng, budget, dim)
    v = x + shell * rho * _unit_ball_samples(rng, budget, dim)
    keep = np.linalg.norm(v - x, axis=-1) > rho
    u, v = u[keep], v[keep]
    d = np.linalg.norm(u - v, axis=-1)
    vals = np.zeros(len(u))
    ok = d >= cutoff
    vals[ok] = density(u[ok], v[ok])
    measure_uv = _ball_volume(rho, dim) * _ball_volume(shell * rho, dim)
    est = float(np.mean(vals)) * measure_uv
    std = float(np.std(vals) / math.sqrt(len(vals))) * measure_uv
    rel = std / est if est > 0 else 0.0
    return est, rel


def _unit_ball_samples(rng, m, dim):
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
# grid isoperimetric form
# ---------------------------------------------------------------------------

def grid_pair_measure(grid, mask_a, mask_b, density, chunk=2_000_000):
    """mu(A x B) for a product density sampled at node pairs."""
    pa = grid.coords(mask_a)
    pb = grid.coords(mask_b)
    h2n = grid.spacing ** (2 * grid.dim)
    total = 0.0
    rows = max(1, chunk // max(len(pb), 1))
    for i0 in range(0, len(pa), rows):
        xa = pa[i0:i0 + rows]
        total += float(np.sum(density(xa[:, None, :], pb[None, :, :])))
    return total * h2n


def theorem3_check(omega, density, candidates, q):
    """sup over candidate sets of the two-sided measure over the relative
    perimeter; a lower bound for the best constant in the seminorm bound."""
    if q < 1:
        raise ConfigurationError("need q >= 1")
    best = (0.0, None)
    rows = []
    for label, g in candidates:
        if g.is_empty():
            continue
        closure = _closure_mask(g)
        rest = omega.interior & ~closure
        m_ab = grid_pair_measure(omega, g.mask, rest, density)
        m_ba = grid_pair_measure(omega, rest, g.mask, density)
        per = perimeter(g, relative=True)
        if per <= 0:
            continue
        ratio = (m_ab + m_ba) ** (1.0 / q) / per
        rows.append({"label": label, "ratio": ratio, "perimeter": per,
                     "measure": m_ab + m_ba})
        if ratio > best[0]:
            best = (ratio, rows[-1])
    report = CriterionReport(best[0], best[1] or {}, best[0],
                             {"candidates": len(rows), "h": omega.spacing})
    report.rows = rows
    return report


def _closure_mask(s):
    from scipy import ndimage

    grown = ndimage.binary_dilation(
        s.mask, ndimage.generate_binary_structure(s.grid.dim, 1))
    return grown


# ---------------------------------------------------------------------------
# marginal-case constants
# ---------------------------------------------------------------------------

def _logquad(fn, lo, hi, limit=200):
    """Int fn(s) ds via the substitution s = e^u (robust for power laws)."""
    if hi <= lo:
        return 0.0

    def g(u):
        s = math.exp(u)
        return fn(s) * s

    if math.isinf(hi):
        v1, _ = integrate.quad(g, math.log(lo), 60.0, limit=limit)
        return v1
    v, _ = integrate.quad(g, math.log(lo), math.log(hi), limit=limit)
    return v


def _cauchy_quad(fn, lo_seq, hi, limit=200):
    """Quadrature with divergence detection at the lower endpoint.

    ``lo_seq`` shrinks by equal log steps; convergent integrals show
    geometrically vanishing increments, log- or power-divergent ones show
    constant or growing increments.
    """
    vals = [_logquad(fn, lo, hi, limit) for lo in lo_seq]
    d_prev = vals[-2] - vals[-3]
    d_last = vals[-1] - vals[-2]
    tol = 1e-10 * max(abs(vals[-1]), 1.0)
    if d_last > tol and d_last > 0.5 * max(d_prev, 0.0):
        return INF
    return vals[-1]


def theorem5_constants(nu: NuFunction, p, tau_grid=None):
    """(S, K, C58): the Hardy-type supremum, the moment integral, and the
    resulting energy-bound constant; infinite values are returned as inf."""
    import warnings

    warnings.filterwarnings("ignore", category=integrate.IntegrationWarning)
    if not p > 1:
        raise ConfigurationError("need p > 1")

    def k_int(s):
        return np.abs(nu.deriv(s)) * s ** (p - 1.0)

    K1 = _cauchy_quad(k_int, [1e-3, 1e-5, 1e-7, 1e-9], 1.0)
    if math.isinf(K1):
        K = INF
    else:
        # upper endpoint: compare growing truncations for divergence
        tails = [_logquad(k_int, 1.0, hi) for hi in (1e4, 1e6, 1e8)]
        d_prev, d_last = tails[1] - tails[0], tails[2] - tails[1]
        if d_last > 1e-10 * max(tails[-1], 1.0) and d_last > 0.5 * d_prev:
            K = INF
        else:
            K = K1 + tails[-1]

    # S = sup_tau (int_0^tau |nu'|^{1/(1-p)} ds/s)^{p-1} int_tau^inf |nu'| ds/s
    def g_int(s):
        with np.errstate(divide="ignore"):
            return np.abs(nu.deriv(s)) ** (1.0 / (1.0 - p)) / s

    def h_int(s):
        return np.abs(nu.deriv(s)) / s

    if tau_grid is None:
        tau_grid = np.logspace(-4, 4, 33)
    g_lo = _cauchy_quad(g_int, [1e-3, 1e-5, 1e-7, 1e-9], tau_grid[0])
    if math.isinf(g_lo):
        S = INF
    else:
        S = 0.0
        g_acc = g_lo
        prev = tau_grid[0]
        S = max(S, g_acc ** (p - 1.0) * _logquad(h_int, prev, np.inf))
        for tau in tau_grid[1:]:
            g_acc += _logquad(g_int, prev, tau)
            S = max(S, g_acc ** (p - 1.0) * _logquad(h_int, tau, np.inf))
            prev = tau
    pprime = p / (p - 1.0)
    if math.isinf(S) or math.isinf(K):
        c58 = INF
    else:
        c58 = (2.0 ** (1.0 / p) * p
               * (S / (p - 1.0) ** (p - 1.0)) ** (1.0 / (p * pprime))
               * K ** (1.0 / p))
    return S, K, c58


def remark6_sharpness(p, nu: NuFunction, Ns, tail=40.0, n_cells=400):
    """Sharpness of the moment condition: truncation profiles u_N.

    For u_N(t) = min(|t|, N) both sides of the kernel inequality are
    integrated on a truncated grid; the running bound
    K(N/2) <= (4/p) * LHS / (2N) must hold for every N.
    """
    rows = []
    prev_rate = None
    for N in Ns:
        L = N + tail
        knots = np.unique(np.concatenate([
            np.linspace(-L, L, n_cells + 1), [-N, 0.0, N]]))
        lhs = _kernel_double_integral(knots, nu, p, N)
        energy = 2.0 * N      # int |u_N'|^p over R
        c_hat = lhs / energy
        k_half, _ = integrate.quad(
            lambda s: np.abs(nu.deriv(s)) * s ** (p - 1.0), 0, N / 2.0,
            limit=200)
        rows.append({"N": N, "lhs": lhs, "energy": energy, "C_hat": c_hat,
                     "K_half": k_half,
                     "bound_holds": k_half <= (4.0 / p) * c_hat * (1 + 1e-9)})
        rate = lhs / N
        if prev_rate is not None:
            rows[-1]["rate_ratio"] = rate / prev_rate
        prev_rate = rate
    return rows


def _kernel_double_integral(knots, nu, p, N):
    """Int |u(t)-u(tau)|^p nu''(|t-tau|) dt dtau, u = min(|t|, N)."""
    gx, gw = np.polynomial.legendre.leggauss(12)
    t_nodes, t_w = [], []
    for a, b in zip(knots[:-1], knots[1:]):
        t_nodes.append(0.5 * (gx + 1) * (b - a) + a)
        t_w.append(0.5 * gw * (b - a))
    t_nodes = np.concatenate(t_nodes)
    t_w = np.concatenate(t_w)
    u = np.minimum(np.abs(t_nodes), N)
    du = np.abs(u[:, None] - u[None, :]) ** p
    dt = np.abs(t_nodes[:, None] - t_nodes[None, :])
    kern = nu.second_deriv(dt)
    return float(t_w @ (du * kern) @ t_w)


# ---------------------------------------------------------------------------
# brute-force ratio oracle and the sufficiency chain
# ---------------------------------------------------------------------------

def brute_force_ratio(mu: ProductMeasure1D, p, q, budget=1000, n_knots=33,
                      seed=0, refine_steps=60):
    """Best found ratio <u>_{q,mu} / ||u'||_p over piecewise-linear u.

    Random starts plus coordinate-ascent refinement; a certified lower bound
    for the best constant.  The seed travels in the report.
    """
    if budget < 100:
        raise ConfigurationError("budget must be at least 100")
    rng = np.random.default_rng(seed)
    wlo, whi = mu.window
    knots = np.linspace(wlo, whi, n_knots)

    def ratio(vals):
        dv = np.diff(vals)
        dx = np.diff(knots)
        en = float(np.sum(np.abs(dv / dx) ** p * dx)) ** (1.0 / p)
        if en == 0:
            return 0.0
        sn = seminorm((knots, vals), mu, q)
        return sn / en

    best_val, best_u = 0.0, None
    n_starts = max(4, budget // 10)
    evals = 0
    for _ in range(n_starts):
        if evals >= budget:
            break
        kind = rng.integers(0, 3)
        if kind == 0:
            vals = np.cumsum(rng.normal(size=n_knots))
        elif kind == 1:
            a, b = np.sort(rng.uniform(wlo, whi, 2))
            vals = np.clip((knots - a) / max(b - a, 1e-9), 0, 1)
        else:
            vals = np.sin(rng.uniform(0.5, 4.0) * math.pi
                          * (knots - wlo) / (whi - wlo))
        r = ratio(vals)
        evals += 1
        if r > best_val:
            best_val, best_u = r, vals.copy()
    if best_u is None:
        best_u = np.linspace(0, 1, n_knots)
        best_val = ratio(best_u)
    step = 0.5
    for _ in range(refine_steps):
        if evals >= budget:
            break
        improved = False
        for i in rng.permutation(n_knots):
            for sgn in (+1.0, -1.0):
                cand = best_u.copy()
                cand[i] += sgn * step
                r = ratio(cand)
                evals += 1
                if r > best_val * (1 + 1e-12):
                    best_val, best_u = r, cand
                    improved = True
                if evals >= budget:
                    break
            if evals >= budget:
                break
        if not improved:
            step *= 0.5
            if step < 1e-4:
                break
    return best_val, {"seed": seed, "evaluations": evals,
                      "knots": n_knots, "best_ratio": best_val}


_EMBED_CACHE = {}


def _hardy_power_constant(p, q, n_grid=400):
    """Best constant in (int_0^inf |f|^q t^{-1-q/p'} dt)^{1/q} <= C ||f'||_p,
    computed by maximizing over discretized increasing profiles."""
    key = ("hardy", p, q)
    if key in _EMBED_CACHE:
        return _EMBED_CACHE[key]
    t = np.logspace(-6, 6, n_grid)
    pprime = p / (p - 1.0)

    # profile parametrized by f' >= 0 on the log grid
    def neg_ratio(logits):
        slope = np.exp(logits)
        f = np.concatenate([[0.0], np.cumsum(
            0.5 * (slope[1:] + slope[:-1]) * np.diff(t))])
        num = np.trapz(np.abs(f) ** q * t ** (-1.0 - q / pprime), t)
        den = np.trapz(slope**p, t) ** (q / p)
        if den <= 0 or not np.isfinite(num):
            return 0.0
        return -(num / den)

    best = 0.0
    for scale in (0.3, 1.0, 3.0):
        x0 = np.log(np.exp(-t / scale) + 1e-12)
        res = optimize.minimize(neg_ratio, x0, method="Nelder-Mead",
                                options={"maxiter": 4000, "fatol": 1e-12})
        best = max(best, -res.fun)
    out = best ** (1.0 / q)
    _EMBED_CACHE[key] = out
    return out


def _besov_embedding_constant(p, q, n_grid=160):
    """Best constant in the fractional double-integral bound by ||f'||_p on
    the half line, estimated over decaying bump profiles."""
    key = ("besov", p, q)
    if key in _EMBED_CACHE:
        return _EMBED_CACHE[key]
    pprime = p / (p - 1.0)
    s_exp = 2.0 + q / pprime
    x = np.linspace(0.0, 30.0, n_grid)

    def neg_ratio(params):
        vals = params
        num = _pw_double_power_integral(x, vals, q, s_exp)
        dv = np.diff(vals)
        dx = np.diff(x)
        den = float(np.sum(np.abs(dv / dx) ** p * dx)) ** (q / p)
        if den <= 0 or not np.isfinite(num):
            return 0.0
        return -(num / den)

    best = 0.0
    for width in (1.0, 3.0, 8.0):
        x0 = 1.0 - np.exp(-x / width)
        res = optimize.minimize(neg_ratio, x0, method="Nelder-Mead",
                                options={"maxiter": 6000, "fatol": 1e-12})
        best = max(best, -res.fun)
    out = best ** (1.0 / q)
    _EMBED_CACHE[key] = out
    return out


def _pw_double_power_integral(x, vals, q, s_exp):
    """Int Int |f(x)-f(y)|^q |x-y|^{-s} over the grid square (graded)."""
    mu = ProductMeasure1D((x[0], x[-1]), kernel=("power", s_exp, 1.0))
    return mu.seminorm_integrand(x, vals, q)


def corollary5_sufficiency_constant(p, q):
    """Constant c(p,q) with best-C <= c(p,q) * B-hat, from the proof chain.

    The two 1-D embedding constants entering the chain are numerically
    calibrated (cached); a 10 percent headroom absorbs their estimation
    error.
    """
    if not (1 < p < q):
        raise ConfigurationError("chain constant defined for 1 < p < q")
    pprime = p / (p - 1.0)
    c_b = _hardy_power_constant(p, q) * 1.1
    c_a = _besov_embedding_constant(p, q) * 1.1
    qp = q / pprime
    cq = 2.0 * qp * ((qp + 1.0) * c_a**q + (1.0 / pprime) * c_b**q)
    return cq ** (1.0 / q)
