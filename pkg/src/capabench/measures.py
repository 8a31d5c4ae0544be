"""Product measures on a 1-D interval squared, and decreasing weights.

A ProductMeasure1D is a density on Omega x Omega (locally finite off the
diagonal) plus finitely many atoms; rectangle measures of power-law kernels
|x - y|^{-s} have closed forms, generic densities fall back to graded tensor
quadrature with log-spaced nodes toward the diagonal.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NonIntegrable

_GAUSS_N = 24
_GLX, _GLW = np.polynomial.legendre.leggauss(_GAUSS_N)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ConfigurationError("empty interval")

    @property
    def length(self):
        return self.hi - self.lo

    def intersect(self, other):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None


def _complement(window, cut):
    """Components of window minus the open interval cut."""
    parts = []
    if cut.lo > window.lo:
        parts.append(Interval(window.lo, min(cut.lo, window.hi)))
    if cut.hi < window.hi:
        parts.append(Interval(max(cut.hi, window.lo), window.hi))
    return parts


# closed forms for the double primitive of u^{-s}: G''(u) = u^{-s}
def _power_G(u, s):
    u = np.asarray(u, float)
    if abs(s - 1.0) < 1e-12:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(u > 0, u * np.log(u) - u, 0.0)
    if abs(s - 2.0) < 1e-12:
        with np.errstate(divide="ignore"):
            return np.where(u > 0, -np.log(u), np.inf)
    a = (1.0 - s) * (2.0 - s)
    with np.errstate(divide="ignore"):
        out = np.where(u > 0, u ** (2.0 - s) / a, 0.0 if s < 2 else np.inf)
    return out


def power_rectangle_measure(I, J, s, gap_floor=0.0):
    """Integral of |x-y|^{-s} over I x J for intervals at positive distance.

    For touching or overlapping intervals the integral over the region
    |x - y| > gap_floor is returned (infinite when s >= 1 and gap_floor = 0
    with overlap; the caller decides how to treat that).
    """
    a, b = I.lo, I.hi
    c, d = J.lo, J.hi
    if b <= c:   # J to the right
        vals = _power_G(np.array([d - a, c - a, d - b, c - b]), s)
        return float(vals[0] - vals[1] - vals[2] + vals[3])
    if d <= a:   # J to the left
        return power_rectangle_measure(J, I, s)
    # overlapping: split into disjoint pieces plus the shared core
    total = 0.0
    core = I.intersect(J)
    for piece in _complement(I, core):
        total += power_rectangle_measure(piece, J, s)
    # core x J: split J around the core
    for piece in _complement(J, core):
        total += power_rectangle_measure(core, piece, s)
    total += _power_square_band(core.length, s, gap_floor)
    return total


def _power_square_band(L, s, delta):
    """Integral of |x-y|^{-s} over the square (0,L)^2 with |x-y| > delta."""
    if L <= 0 or delta >= L:
        return 0.0
    # 2 * int_delta^L (L - u) u^{-s} du
    if delta <= 0 and s >= 1:
        return math.inf
    lo = max(delta, 0.0)

    def F(u):
        if abs(s - 1.0) < 1e-12:
            return L * math.log(u) - u
        if abs(s - 2.0) < 1e-12:
            return -L / u - math.log(u)
        return (L * u ** (1 - s) / (1 - s)) - (u ** (2 - s) / (2 - s))

    return 2.0 * (F(L) - F(lo))


@dataclass
class ProductMeasure1D:
    """Measure on (alpha, beta)^2: density plus atoms, with a diagonal cut.

    ``kernel`` may be ("uniform", c) or ("power", s, c) for closed-form
    rectangle measures (density c resp. c |x-y|^{-s}); otherwise supply
    ``density`` as a callable of (x, y) arrays.  Infinite intervals carry a
    finite truncation ``window`` used by the search drivers.
    """

    interval: tuple
    kernel: tuple = None
    density: object = None
    atoms: list = field(default_factory=list)
    diagonal_cutoff: float = 0.0
    window: tuple = None

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ConfigurationError("interval must have positive length")
        if self.kernel is None and self.density is None and not self.atoms:
            self.kernel = ("uniform", 0.0)
        if self.window is None:
            wlo = lo if math.isfinite(lo) else -64.0
            whi = hi if math.isfinite(hi) else 64.0
            self.window = (wlo, whi)
        for (x, y), mass in self.atoms:
            if mass < 0:
                raise ConfigurationError("atom masses must be nonnegative")

    @classmethod
    def uniform(cls, interval=(0.0, 1.0), c=1.0, cutoff=0.0):
        return cls(interval, kernel=("uniform", c), diagonal_cutoff=cutoff)

    @classmethod
    def power(cls, s, interval=(0.0, 1.0), c=1.0, cutoff=0.0):
        return cls(interval, kernel=("power", s, c), diagonal_cutoff=cutoff)

    @classmethod
    def from_atoms(cls, atoms, interval=(0.0, 1.0)):
        return cls(interval, atoms=list(atoms))

    def clip(self, iv: Interval):
        lo = max(iv.lo, self.window[0])
        hi = min(iv.hi, self.window[1])
        return Interval(lo, hi) if lo < hi else None

    def measure(self, I: Interval, J: Interval):
        """mu(I x J) honouring the diagonal cutoff."""
        I = self.clip(I)
        J = self.clip(J)
        if I is None or J is None:
            return 0.0
        total = 0.0
        for (x, y), mass in self.atoms:
            if I.lo <= x <= I.hi and J.lo <= y <= J.hi:
                if abs(x - y) >= self.diagonal_cutoff:
                    total += mass
        if self.kernel is not None:
            kind = self.kernel[0]
            if kind == "uniform":
                c = self.kernel[1]
                if c != 0.0:
                    if self.diagonal_cutoff > 0:
                        total += c * _uniform_cutoff_measure(
                            I, J, self.diagonal_cutoff)
                    else:
                        total += c * I.length * J.length
            elif kind == "power":
                s, c = self.kernel[1], self.kernel[2]
                val = power_rectangle_measure(I, J, s, self.diagonal_cutoff)
                total += c * val
            else:
                raise ConfigurationError(f"unknown kernel {kind!r}")
        elif self.density is not None:
            total += _density_quadrature(self.density, I, J,
                                         self.diagonal_cutoff)
        return total

    def seminorm_integrand(self, u_knots, u_vals, q):
        """<u>_{q,mu}^q for piecewise-linear u (quadrature + atoms)."""
        total = 0.0
        for (x, y), mass in self.atoms:
            if abs(x - y) >= self.diagonal_cutoff:
                du = abs(np.interp(x, u_knots, u_vals)
                         - np.interp(y, u_knots, u_vals))
                total += mass * du**q
        if self.kernel is None and self.density is None:
            return total
        dens = self._density_callable()
        lo, hi = self.window
        knots = np.unique(np.clip(np.asarray(u_knots, float), lo, hi))
        if knots[0] > lo:
            knots = np.concatenate([[lo], knots])
        if knots[-1] < hi:
            knots = np.concatenate([knots, [hi]])
        total += _cell_pair_quadrature(dens, knots, u_knots, u_vals, q,
                                       self.diagonal_cutoff)
        return total

    def _density_callable(self):
        if self.density is not None:
            return self.density
        kind = self.kernel[0]
        if kind == "uniform":
            c = self.kernel[1]
            return lambda x, y: np.full_like(np.asarray(x, float), c)
        s, c = self.kernel[1], self.kernel[2]

        def dens(x, y):
            with np.errstate(divide="ignore"):
                return c * np.abs(np.asarray(x) - np.asarray(y)) ** (-s)
        return dens


def _uniform_cutoff_measure(I, J, delta):
    """area of {(x,y) in I x J : |x-y| > delta}."""
    # piecewise-linear in each variable: integrate the admissible y-length
    xs = 0.5 * (_GLX + 1.0) * I.length + I.lo
    w = 0.5 * _GLW * I.length
    ylen = np.zeros_like(xs)
    for k, x in enumerate(xs):
        lo1, hi1 = J.lo, min(J.hi, x - delta)
        lo2, hi2 = max(J.lo, x + delta), J.hi
        ylen[k] = max(hi1 - lo1, 0.0) + max(hi2 - lo2, 0.0)
    return float(np.sum(w * ylen))


def _graded_segments(iv: Interval, near, delta, n_coarse=8):
    """Split iv with log grading toward the point ``near`` (distance delta)."""
    pts = [iv.lo, iv.hi]
    if iv.lo <= near <= iv.hi or min(abs(near - iv.lo), abs(near - iv.hi)) < 2:
        d0 = max(delta, 1e-9)
        span = max(abs(iv.hi - near), abs(near - iv.lo))
        scales = d0 * np.power(2.0, np.arange(0, 60))
        scales = scales[scales < span]
        for s in scales:
            for cand in (near - s, near + s):
                if iv.lo < cand < iv.hi:
                    pts.append(cand)
    pts.extend(np.linspace(iv.lo, iv.hi, n_coarse + 1).tolist())
    return np.unique(np.asarray(pts))


def _density_quadrature(dens, I, J, delta):
    """Tensor Gauss quadrature of the density over I x J minus the band."""
    mid_gap = max(J.lo - I.hi, I.lo - J.hi)
    total = 0.0
    xs_seg = _graded_segments(I, 0.5 * (J.lo + J.hi), max(delta, 1e-9))
    for k in range(len(xs_seg) - 1):
        a, b = xs_seg[k], xs_seg[k + 1]
        x = 0.5 * (_GLX + 1.0) * (b - a) + a
        wx = 0.5 * _GLW * (b - a)
        for xi, wxi in zip(x, wx):
            # y-integral over J minus the cutoff band around xi
            for part in _complement(J, Interval(xi - delta, xi + delta)) \
                    if delta > 0 else [J]:
                ys_seg = _graded_segments(part, xi, max(delta, 1e-9), 4)
                for m in range(len(ys_seg) - 1):
                    c, d = ys_seg[m], ys_seg[m + 1]
                    y = 0.5 * (_GLX + 1.0) * (d - c) + c
                    wy = 0.5 * _GLW * (d - c)
                    total += wxi * float(np.sum(wy * dens(xi, y)))
    return total


def _cell_pair_quadrature(dens, knots, u_knots, u_vals, q, delta):
    """Int |u(x)-u(y)|^q dens over the window square minus the band."""
    total = 0.0
    nseg = len(knots) - 1
    for i in range(nseg):
        a, b = knots[i], knots[i + 1]
        x = 0.5 * (_GLX + 1.0) * (b - a) + a
        wx = 0.5 * _GLW * (b - a)
        ux = np.interp(x, u_knots, u_vals)
        for xi, wxi, uxi in zip(x, wx, ux):
            band = Interval(xi - delta, xi + delta) if delta > 0 else None
            for j in range(nseg):
                c, d = knots[j], knots[j + 1]
                pieces = [Interval(c, d)]
                if band is not None:
                    pieces = _complement(Interval(c, d), band)
                for piece in pieces:
                    ys_seg = _graded_segments(piece, xi, max(delta, 1e-9), 2)
                    for m in range(len(ys_seg) - 1):
                        cc, dd = ys_seg[m], ys_seg[m + 1]
                        y = 0.5 * (_GLX + 1.0) * (dd - cc) + cc
                        wy = 0.5 * _GLW * (dd - cc)
                        uy = np.interp(y, u_knots, u_vals)
                        total += wxi * float(
                            np.sum(wy * np.abs(uxi - uy) ** q * dens(xi, y)))
    return total


# ---------------------------------------------------------------------------
# decreasing weights nu for the marginal-case constants
# ---------------------------------------------------------------------------

@dataclass
class NuFunction:
    """Positive, non-increasing, vanishing weight with derivative access."""

    fn: object
    dfn: object
    d2fn: object = None

    def __post_init__(self):
        sigma = np.logspace(-6, 8, 120)
        vals = self(sigma)
        dvals = self.deriv(sigma)
        if np.any(vals < 0):
            raise ConfigurationError("nu must be nonnegative")
        if np.any(dvals > 1e-12):
            raise ConfigurationError("nu must be non-increasing")
        if vals[-1] > max(1e-6 * vals[0], 1e-30) and vals[0] > 0:
            raise ConfigurationError("nu must vanish at infinity")

    def __call__(self, sigma):
        return np.asarray(self.fn(np.asarray(sigma, float)), float)

    def deriv(self, sigma):
        return np.asarray(self.dfn(np.asarray(sigma, float)), float)

    def second_deriv(self, s):
        if self.d2fn is None:
            raise ConfigurationError("nu has no second derivative attached")
        return np.asarray(self.d2fn(np.asarray(s, float)), float)

    @classmethod
    def exponential(cls):
        return cls(lambda s: np.exp(-s), lambda s: -np.exp(-s),
                   lambda s: np.exp(-s))

    @classmethod
    def power_pair(cls, a_near=0.5, a_far=1.5):
        """sigma^{-a_near} near 0 crossing to sigma^{-a_far} past 1."""
        if not 0 < a_near < a_far:
            raise ConfigurationError("need 0 < a_near < a_far")

        def fn(s):
            s = np.asarray(s, float)
            return np.where(s <= 1.0, s ** -a_near, s ** -a_far)

        def dfn(s):
            s = np.asarray(s, float)
            return np.where(s <= 1.0, -a_near * s ** (-a_near - 1),
                            -a_far * s ** (-a_far - 1))
        return cls(fn, dfn)

    @classmethod
    def power_near_zero(cls, a, sigma1=1.0):
        """sigma^{-a} up to sigma1, exponential decay beyond (continuous)."""

        def fn(s):
            s = np.asarray(s, float)
            return np.where(s <= sigma1, s ** -a,
                            sigma1 ** -a * np.exp(-(s - sigma1)))

        def dfn(s):
            s = np.asarray(s, float)
            return np.where(s <= sigma1, -a * s ** (-a - 1),
                            -(sigma1 ** -a) * np.exp(-(s - sigma1)))
        return cls(fn, dfn)
