"""First Bessel-function roots needed by the eigenvalue reference constants.

Only nu = 0 and nu = 1/2 arise (planar and spatial domains).  j_{1/2} = pi
exactly since J_{1/2}(x) is proportional to sin(x)/sqrt(x); j_0 is found by
bisection on the power series, which is alternating and fast-converging on
the bracketing interval.
"""

import math


def bessel_j0(x):
    """J_0 by its power series; adequate for |x| <= 12."""
    term = 1.0
    total = 1.0
    q = 0.25 * x * x
    for k in range(1, 60):
        term *= -q / (k * k)
        total += term
        if abs(term) < 1e-18:
            break
    return total


def first_root_j0():
    lo, hi = 2.0, 3.0
    flo = bessel_j0(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = bessel_j0(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


J0_FIRST_ROOT = first_root_j0()


def first_bessel_root(order2):
    """j_{(n-2)/2} given the doubled order n-2 (supports n = 2 and n = 3)."""
    if order2 == 0:
        return J0_FIRST_ROOT
    if order2 == 1:
        return math.pi
    raise ValueError("only orders 0 and 1/2 are provided")


def faber_krahn_reference(dim, domain_volume):
    """(j_{(n-2)/2} / R)^2 with R the radius of the equal-volume ball."""
    from .capacity import sphere_surface_area

    ball_unit = sphere_surface_area(dim) / dim
    radius = (domain_volume / ball_unit) ** (1.0 / dim)
    j = first_bessel_root(dim - 2)
    return (j / radius) ** 2
