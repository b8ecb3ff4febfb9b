"""Bounded rational polytopes, dilated lattice-point counts, Ehrhart series
with their -1 limit at infinity, fiber polytopes cut out by torus weight data,
and the ordered-weight regions Delta_{m,s} with their two counting modes.

H-representations mean {x : A x >= b}.  Boundedness is certified by exact
Fourier-Motzkin feasibility on the recession cone, and bounding boxes come
from vertex enumeration over all d x d inequality subsystems (no LP solver).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .ratfun import NoRationalFit, Series, fit_rational
from .scalar import ExactScalar


class EhrhartError(Exception):
    pass


class Unbounded(EhrhartError):
    """The inequality system has a nonzero recession direction."""


# ---------------------------------------------------------------------------
# Exact linear algebra / Fourier-Motzkin helpers.


def solve_square(rows, rhs):
    """Solve a square rational system by Gaussian elimination.

    Returns the solution vector or None when the matrix is singular.
    """
    d = len(rhs)
    m = [list(rows[i]) + [rhs[i]] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(d):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[i][d] for i in range(d))


def fm_feasible(rows, rhs) -> bool:
    """Exact feasibility of {x : rows @ x >= rhs} by Fourier-Motzkin."""
    system = [(tuple(Fraction(c) for c in row), Fraction(r)) for row, r in zip(rows, rhs)]
    d = len(system[0][0]) if system else 0
    for var in range(d):
        lowers, uppers, rest = [], [], []
        for coeffs, r in system:
            c = coeffs[var]
            if c > 0:
                lowers.append((coeffs, r, c))
            elif c < 0:
                uppers.append((coeffs, r, c))
            else:
                rest.append((coeffs, r))
        new = rest
        for lc, lr, lv in lowers:
            for uc, ur, uv in uppers:
                # x >= (lr - ...)/lv and x <= (ur - ...)/uv combine
                coeffs = tuple(a / lv - b / uv for a, b in zip(lc, uc))
                new.append((coeffs, lr / lv - ur / uv))
        system = new
    return all(r <= 0 for _, r in system)


def _has_recession_direction(rows) -> bool:
    d = len(rows[0])
    for i in range(d):
        for sign in (1, -1):
            unit = [Fraction(0)] * d
            unit[i] = Fraction(sign)
            sys_rows = [list(r) for r in rows] + [unit]
            rhs = [Fraction(0)] * len(rows) + [Fraction(1)]
            if fm_feasible(sys_rows, rhs):
                return True
    return False


def positive_functional_exists(vectors) -> bool:
    """Is there theta with <v, theta> > 0 for every v?  (Gordan's alternative:
    equivalent to the absence of a nonzero nonnegative relation of the v's.)"""
    if not vectors:
        return True
    d = len(vectors[0])
    if d == 0:
        return False
    rhs = [Fraction(1)] * len(vectors)
    return fm_feasible([list(map(Fraction, v)) for v in vectors], rhs)


# ---------------------------------------------------------------------------
# Polytopes.


def hull_hrep(vertices):
    """H-representation of the convex hull of full-dimensional point sets,
    d <= 3 (facet enumeration over d-subsets)."""
    d = len(vertices[0])
    pts = [tuple(Fraction(c) for c in v) for v in vertices]
    if d == 1:
        lo = min(p[0] for p in pts)
        hi = max(p[0] for p in pts)
        return [(Fraction(1),), (Fraction(-1),)], [lo, -hi]
    if d > 3:
        raise EhrhartError("hull construction implemented for d <= 3")
    diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
    if not any(
        solve_square(sub, [Fraction(0)] * d) is not None
        for sub in itertools.combinations(diffs, d)
    ):
        raise EhrhartError("point set is not full-dimensional")
    rows, rhs = [], []
    seen = set()
    for subset in itertools.combinations(pts, d):
        normal = _hyperplane_normal(subset)
        if normal is None:
            continue
        c = sum(a * b for a, b in zip(normal, subset[0]))
        vals = [sum(a * b for a, b in zip(normal, p)) for p in pts]
        if all(v >= c for v in vals):
            n, off = normal, c
        elif all(v <= c for v in vals):
            n, off = tuple(-a for a in normal), -c
        else:
            continue
        n, off = _normalize_ineq(n, off)
        if (n, off) not in seen:
            seen.add((n, off))
            rows.append(list(n))
            rhs.append(off)
    if not rows:
        raise EhrhartError("point set is not full-dimensional")
    return rows, rhs


def _hyperplane_normal(points):
    d = len(points[0])
    diffs = [tuple(a - b for a, b in zip(p, points[0])) for p in points[1:]]
    if d == 2:
        (dx, dy), = diffs
        if dx == 0 and dy == 0:
            return None
        return (-dy, dx)
    u, v = diffs
    n = (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
    return None if all(x == 0 for x in n) else n


def _normalize_ineq(n, off):
    lcm = 1
    for x in itertools.chain(n, [off]):
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in itertools.chain(n, [off])]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints[:-1]), Fraction(ints[-1])


class RationalPolytope:
    """Bounded rational polytope {x : A x >= b}, with certified bounding box."""

    def __init__(self, rows, rhs, vertices=None):
        self.rows = [tuple(Fraction(c) for c in row) for row in rows]
        self.rhs = [Fraction(r) for r in rhs]
        self.dim = len(self.rows[0]) if self.rows else 0
        self.is_empty = not fm_feasible(self.rows, self.rhs)
        if not self.is_empty and _has_recession_direction(self.rows):
            raise Unbounded("inequality system does not cut out a bounded region")
        self.vertices = self._enumerate_vertices() if not self.is_empty else []
        if vertices is not None:
            given = [tuple(Fraction(c) for c in v) for v in vertices]
            for v in given:
                for row, r in zip(self.rows, self.rhs):
                    if sum(a * b for a, b in zip(row, v)) < r:
                        raise EhrhartError(f"vertex {v} violates the H-representation")
        self.box = self._bounding_box()

    @staticmethod
    def from_hrep(rows, rhs) -> "RationalPolytope":
        return RationalPolytope(rows, rhs)

    @staticmethod
    def from_vertices(vertices) -> "RationalPolytope":
        rows, rhs = hull_hrep(vertices)
        return RationalPolytope(rows, rhs, vertices=vertices)

    def _enumerate_vertices(self):
        found = set()
        d = self.dim
        for subset in itertools.combinations(range(len(self.rows)), d):
            sol = solve_square([self.rows[i] for i in subset], [self.rhs[i] for i in subset])
            if sol is None:
                continue
            if all(
                sum(a * b for a, b in zip(row, sol)) >= r
                for row, r in zip(self.rows, self.rhs)
            ):
                found.add(sol)
        return sorted(found)

    def _bounding_box(self):
        if self.is_empty:
            return [(Fraction(0), Fraction(-1))] * self.dim
        if not self.vertices:
            raise Unbounded("no vertices found for a nonempty system")
        return [
            (min(v[j] for v in self.vertices), max(v[j] for v in self.vertices))
            for j in range(self.dim)
        ]

    def scaled(self, c) -> "RationalPolytope":
        """The dilation c*P."""
        c = Fraction(c)
        return RationalPolytope(self.rows, [c * r for r in self.rhs])

    def vertex_denominator_lcm(self) -> int:
        out = 1
        for v in self.vertices:
            for x in v:
                out = out * x.denominator // math.gcd(out, x.denominator)
        return out

    def contains(self, point) -> bool:
        p = [Fraction(c) for c in point]
        return not self.is_empty and all(
            sum(a * b for a, b in zip(row, p)) >= r for row, r in zip(self.rows, self.rhs)
        )

    def to_json(self):
        from .scalar import format_rat

        return {
            "A": [[format_rat(c) for c in row] for row in self.rows],
            "b": [format_rat(r) for r in self.rhs],
            "vertices": [[format_rat(c) for c in v] for v in self.vertices],
        }


def count_dilation(polytope: RationalPolytope, r: int) -> int:
    """Number of points of (1/r)Z^d satisfying the inequalities, by exact
    enumeration over the scaled bounding box (inner loops vectorized)."""
    if r < 1:
        raise ValueError("dilation index must be positive")
    if polytope.is_empty:
        return 0
    d = polytope.dim
    if d == 0:
        return 1
    # Integer form: z in Z^d with Ai z >= r*bi, Ai = L*A, bi = L*b.
    lcm = 1
    for row, rhs in zip(polytope.rows, polytope.rhs):
        for x in itertools.chain(row, [rhs]):
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    rows = [[int(c * lcm) for c in row] for row in polytope.rows]
    rhs = [int(b * lcm) * r for b in polytope.rhs]
    ranges = []
    for lo, hi in polytope.box:
        zlo = math.ceil(lo * r)
        zhi = math.floor(hi * r)
        if zlo > zhi:
            return 0
        ranges.append((zlo, zhi))
    if d == 1:
        lo, hi = ranges[0]
        for (a,), b in zip(rows, rhs):
            if a > 0:
                lo = max(lo, -((-b) // a))
            elif a < 0:
                hi = min(hi, b // a)
            elif b > 0:
                return 0
        return max(0, hi - lo + 1)

    y_lo, y_hi = ranges[-2]
    ys = np.arange(y_lo, y_hi + 1, dtype=np.int64)
    total = 0
    prefix_ranges = [range(lo, hi + 1) for lo, hi in ranges[:-2]]
    z_lo, z_hi = ranges[-1]
    for prefix in itertools.product(*prefix_ranges):
        lo = np.full(ys.shape, z_lo, dtype=np.int64)
        hi = np.full(ys.shape, z_hi, dtype=np.int64)
        ok = np.ones(ys.shape, dtype=bool)
        for row, b in zip(rows, rhs):
            rest = b - sum(c * p for c, p in zip(row[:-2], prefix)) - row[-2] * ys
            a = row[-1]
            if a > 0:
                np.maximum(lo, -((-rest) // a), out=lo)
            elif a < 0:
                np.minimum(hi, rest // a, out=hi)
            else:
                ok &= rest <= 0
        width = hi - lo + 1
        np.maximum(width, 0, out=width)
        total += int(width[ok].sum())
    return total


def ehrhart_series(polytope: RationalPolytope, order: int) -> Series:
    return Series([count_dilation(polytope, r) for r in range(1, order + 1)])


def ehrhart_limit(polytope: RationalPolytope, order: int | None = None) -> ExactScalar:
    """Fit the dilated-count series and evaluate at T -> infinity.

    Equals -1 for every nonempty bounded rational polytope, 0 for the empty one.
    """
    if polytope.is_empty:
        return ExactScalar.zero()
    delta = polytope.vertex_denominator_lcm()
    big_d = polytope.dim + 1
    if order is None:
        order = delta * big_d + delta + 2
    fit = fit_rational(ehrhart_series(polytope, order), delta, big_d)
    return fit.limit_at_infinity()


def fiber_polytope(weights, vals) -> RationalPolytope:
    """Bounded region in the cocharacter space cut out by torus weight data.

    weights is a k x n integer matrix whose columns are the acting characters
    chi_j, vals the coordinate valuations v_j of a chosen lift.  Building
    coordinates are used (the group translates by minus the valuation), so the
    region is {theta : <chi_j, theta> <= v_j}.  Raises Unbounded when the
    configuration does not cut a polytope.
    """
    k = len(weights)
    n = len(weights[0]) if k else 0
    if len(vals) != n:
        raise ValueError("one valuation per column is required")
    rows = []
    rhs = []
    for j in range(n):
        rows.append([-Fraction(weights[i][j]) for i in range(k)])
        rhs.append(-Fraction(vals[j]))
    return RationalPolytope(rows, rhs)


# ---------------------------------------------------------------------------
# Delta regions: 0 < w_1 < ... < w_s <= 1/m.


class DeltaRegion:
    __slots__ = ("m", "s")

    def __init__(self, m: int, s: int):
        if m < 1 or s < 1:
            raise ValueError("need m, s >= 1")
        self.m = m
        self.s = s

    def __repr__(self):
        return f"DeltaRegion(m={self.m}, s={self.s})"

    def grid(self, r: int):
        """The r-torsion points of (0, 1/m] as fractions k/r."""
        return [Fraction(k, r) for k in range(1, r // self.m + 1)]


def _mod_interval(x: Fraction, m: int) -> Fraction:
    """Reduce x into (0, 1/m] modulo 1/m."""
    rem = x - Fraction(math.floor(x * m), m)
    return rem if rem else Fraction(1, m)


def delta_count(region: DeltaRegion, r: int, mode: str = "differences") -> int:
    """Count for the weight region at torsion order r.

    differences: tuples (d_1, ..., d_{s-1}) of positive multiples of 1/r with
    sum < 1/m (the consecutive-difference parametrization).
    orbits: translation orbits on the r-torsion points of the region,
    enumerated explicitly under the set-preserving translations by k/r.
    """
    if r < 1:
        raise ValueError("r must be positive")
    m, s = region.m, region.s
    if mode == "differences":
        budget = math.ceil(Fraction(r, m)) - 1
        return math.comb(budget, s - 1) if budget >= s - 1 else 0
    if mode != "orbits":
        raise ValueError(f"unknown mode {mode!r}")
    grid = region.grid(r)
    if len(grid) < s:
        return 0
    grid_set = set(grid)
    translations = []
    for k in range(r):
        t = Fraction(k, r)
        if all(_mod_interval(w + t, m) in grid_set for w in grid):
            translations.append(t)
    if math.comb(len(grid), s) > 5000:
        return _orbit_count_burnside(grid, translations, m, s)
    subsets = [tuple(sorted(c)) for c in itertools.combinations(grid, s)]
    seen = set()
    orbits = 0
    for sub in subsets:
        if sub in seen:
            continue
        orbits += 1
        for t in translations:
            image = tuple(sorted(_mod_interval(w + t, m) for w in sub))
            seen.add(image)
    return orbits


def _orbit_count_burnside(grid, translations, m: int, s: int) -> int:
    """Average fixed s-subsets over the translation group.  Every translation
    permutes the grid in cycles of one common length, so the fixed-subset
    count is binomial."""
    n = len(grid)
    total = 0
    for t in translations:
        # order of the translation as a permutation of the grid
        w0 = grid[0]
        w = _mod_interval(w0 + t, m)
        order = 1
        while w != w0:
            w = _mod_interval(w + t, m)
            order += 1
        if s % order == 0:
            total += math.comb(n // order, s // order)
    assert total % len(translations) == 0
    return total // len(translations)


def delta_limit(region: DeltaRegion, mode: str = "differences", order: int | None = None) -> ExactScalar:
    """Fit the per-r count series of the region and report its exact limit at
    T -> infinity, without forcing any expected value."""
    m, s = region.m, region.s
    lcm_s = math.lcm(*range(1, s + 1))
    ladder = [
        (m, s),
        (m * lcm_s, s),
        (m * lcm_s, s + 1),
        (2 * m * lcm_s, s + 2),
    ]
    last_error = None
    for delta, big_d in ladder:
        need = delta * big_d + delta + 2
        r_max = max(order or 0, need)
        series = Series([delta_count(region, r, mode) for r in range(1, r_max + 1)])
        try:
            return fit_rational(series, delta, big_d).limit_at_infinity()
        except NoRationalFit as exc:
            last_error = exc
    raise last_error
