"""Integer-grid feasibility oracles for cross-checking 2D projections.

Everything here works in scaled integer units (value = index / steps), so
membership decisions are exact and independent of the rational elimination
code they are checked against.
"""

import math
from fractions import Fraction

import numpy as np


def d3_feasible_grid() -> np.ndarray:
    """(201, 101) booleans: whether (l1, mu) = (a/100, m/100) is feasible.

    Brute-forces the six-variable low-spin d-shell description on a 1/100
    grid of (l1, l2, l3, l4, mu); l5 is fixed by the trace.  All arithmetic
    is integer.  In units of 1/100 with a >= b >= c >= d >= e >= 0,
    a + b + c + d + e = 300 and a <= 200, the rows become

        a + (d + e)/2 <= 200   <=>  b + c >= a - 100   (d + e is fixed),
        m <= 300 - 2(a - b),
        m <= 300 - 2(b - c),
        m >= 2(a - c) - 300,
        m >= 4a - 2b + 2d - 700,
        0 <= m <= 100.

    Only the fifth row depends on d, and it is increasing in d, so the
    union over admissible d of the mu-windows is the window at the
    smallest d.  d itself ranges over max(0, ceil(S/2)) .. min(c, S)
    with S = 300 - a - b - c (from d >= e, d <= c, e >= 0).
    """
    feasible = np.zeros((201, 101), dtype=bool)
    b_grid, c_grid = np.meshgrid(np.arange(301), np.arange(301), indexing="ij")
    mu_col = np.arange(101)[:, None]
    for a in range(201):
        s = 300 - a - b_grid - c_grid
        ok = (b_grid <= a) & (c_grid <= b_grid) & (s >= 0)
        ok &= b_grid + c_grid >= a - 100
        d_min = np.maximum(0, (s + 1) // 2)  # ceil(S/2), s >= 0 where ok
        d_max = np.minimum(c_grid, s)
        ok &= d_min <= d_max
        if not ok.any():
            continue
        lo = np.maximum(0, 2 * (a - c_grid) - 300)
        lo = np.maximum(lo, 4 * a - 2 * b_grid + 2 * d_min - 700)
        hi = np.minimum(100, 300 - 2 * (a - b_grid))
        hi = np.minimum(hi, 300 - 2 * (b_grid - c_grid))
        ok &= lo <= hi
        los = lo[ok]
        if los.size == 0:
            continue
        his = hi[ok]
        covered = (los[None, :] <= mu_col) & (mu_col <= his[None, :])
        feasible[a] = covered.any(axis=1)
    return feasible


def scan_system(system, axes, steps, bounds=(0, 1)):
    """Exact brute-force projection of a small system onto two variables.

    Walks the full cartesian grid value = lo + k*(hi - lo)/steps for every
    variable and collects the (i, j) index pairs of `axes` that extend to
    a feasible grid point.  Row tests are cleared of denominators first,
    so the comparisons are pure integer.  Only usable for a handful of
    variables; meant for 3-variable sanity systems.
    """
    names = list(system.variables)
    nvar = len(names)
    if nvar > 4:
        raise ValueError("full mesh scan is for small systems only")
    ix, iy = names.index(axes[0]), names.index(axes[1])
    lo, hi = Fraction(bounds[0]), Fraction(bounds[1])
    span = hi - lo

    def int_row(coeffs, bound):
        # sum c_j (lo + k_j * span / steps) <= bound, cleared to integers
        shifted = bound - sum(c * lo for c in coeffs)
        scaled = [c * span for c in coeffs]
        denom = math.lcm(*(q.denominator for q in list(scaled) + [shifted]))
        denom *= steps
        coef = np.array([int(q * denom) // steps for q in scaled], dtype=np.int64)
        return coef, int(shifted * denom)

    grids = np.meshgrid(*([np.arange(steps + 1)] * nvar), indexing="ij")
    ok = np.ones(grids[0].shape, dtype=bool)
    for coeffs, bound in system.inequalities:
        coef, rhs = int_row(coeffs, bound)
        total = sum(int(c) * g for c, g in zip(coef, grids))
        ok &= total <= rhs
    for coeffs, bound in system.equalities:
        coef, rhs = int_row(coeffs, bound)
        total = sum(int(c) * g for c, g in zip(coef, grids))
        ok &= total == rhs
    pairs = set()
    if ok.any():
        xs = grids[ix][ok].ravel()
        ys = grids[iy][ok].ravel()
        pairs = set(zip(xs.tolist(), ys.tolist()))
    return pairs
