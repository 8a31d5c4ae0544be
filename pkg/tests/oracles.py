"""Independent reference computations used by the test suite.

These deliberately avoid the production code paths: radial capacities come
from a 1-D finite-difference minimization, Bessel roots from scipy, and
quadratures from scipy.integrate.
"""

import numpy as np
from scipy import special
from scipy.linalg import solve_banded


def bessel_root(nu, k=1):
    return float(special.jn_zeros(nu, k)[-1]) if nu == int(nu) else {
        0.5: np.pi}[nu]


def radial_p_capacity(r, R, dim, p, n_nodes=4000):
    """1-D minimization of |S^{n-1}| int |w'|^p rho^{n-1} over radial profiles.

    Solved by IRLS on the tridiagonal weighted system; independent of the
    n-D grid solver.
    """
    area = 2.0 * np.pi ** (dim / 2.0) / special.gamma(dim / 2.0)
    rho = np.linspace(r, R, n_nodes)
    drho = rho[1] - rho[0]
    mid = 0.5 * (rho[:-1] + rho[1:])
    w_geom = mid ** (dim - 1)

    # unknowns: interior values, w(r)=1, w(R)=0; damped IRLS
    vals = np.linspace(1.0, 0.0, n_nodes)
    wq = None
    energy = np.inf
    for _ in range(400):
        slope = np.diff(vals) / drho
        wq_raw = np.maximum(np.abs(slope), 1e-12) ** (p - 2.0) * w_geom
        wq = wq_raw if wq is None else np.sqrt(wq * wq_raw)
        n_int = n_nodes - 2
        ab = np.zeros((3, n_int))
        rhs = np.zeros(n_int)
        ab[1] = wq[:-1] + wq[1:]
        ab[0, 1:] = -wq[1:-1]
        ab[2, :-1] = -wq[1:-1]
        rhs[0] = wq[0] * 1.0
        new_int = solve_banded((1, 1), ab, rhs)
        vals = np.concatenate([[1.0], new_int, [0.0]])
        slope = np.diff(vals) / drho
        new_energy = area * np.sum(np.abs(slope) ** p * w_geom) * drho
        if abs(new_energy - energy) < 1e-12 * max(new_energy, 1.0):
            energy = new_energy
            break
        energy = new_energy
    return float(energy)


def quad_exp_k(p):
    """K = int |nu'| sigma^{p-1} for nu = exp(-sigma), by scipy quadrature."""
    from scipy.integrate import quad

    val, _ = quad(lambda s: np.exp(-s) * s ** (p - 1.0), 0, np.inf)
    return val
