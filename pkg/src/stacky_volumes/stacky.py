"""The p-adic volume engine and BPS extraction.

Toric side: for a split quotient stack [A^n / G] with G a split torus times a
product of split finite cyclic group schemes, enumerate the twisted points of
the special fibre (orbits of G(F_q) on a fibre of the coarse map, paired with
homomorphisms mu_r -> stabilizer read off through Cartier duality), weight
them by q^{-w}, form the generating series in T, fit it as a rational function
and evaluate minus its limit at T -> infinity.  This reproduces the orbifold
volume of the coarse space.

Linear side: for the monoid of vector spaces, the weighted inertia count of
the rigidified automorphism groups is computed two ways: a parametrized path
(trace tuples, weight-region counts, Moebius/gerbe factors) and a brute-force
path over projective linear groups of small finite fields.  Minus the limit,
normalized by half-Lefschetz powers, yields a counting function satisfying
the plethystic-logarithm identity; the residual of that identity is exposed
as a report.  Refined BPS invariants of symmetric quivers are extracted by
applying the plethystic logarithm to stacky point counts.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .ehrhart import DeltaRegion, delta_count, positive_functional_exists
from .lambdaring import CountingFunction, VolumeElem, pleth_log, pleth_sym, log_direct
from .ratfun import NoRationalFit, Series, fit_rational
from .scalar import (
    DEFAULT_CONVENTION,
    ExactScalar,
    HalfLConvention,
    half_l_power,
    q_power,
    root_of_unity,
)
from .monoids import LinearObjectsMonoid, Quiver, gl_order


class StackyError(Exception):
    pass


class NonSplitFiniteGroup(StackyError):
    """Some finite cyclic order does not divide q - 1."""


class NoBasePoint(StackyError):
    """The requested fibre is empty."""


class UnsupportedAutGroup(StackyError):
    """The parametrized weighted-inertia path needs a product of general
    linear groups (the vector-space variant)."""


class BruteForceTooLarge(StackyError):
    pass


class NotGenericallyRepresentable(StackyError):
    """Every point of the affine space has a nontrivial stabilizer."""


# ---------------------------------------------------------------------------
# Small exact integer linear algebra.


def smith_invariants(cols, rows: int):
    """Diagonalize Z^rows / (span of the given columns) by integer row and
    column operations.  Returns (free rank, diagonal factors > 1); any
    diagonalization determines the cokernel group, which is all the callers
    use (point counts and character enumeration are presentation-invariant).
    """
    if not cols:
        return rows, []
    mat = [[col[r] for col in cols] for r in range(rows)]
    n_rows, n_cols = rows, len(cols)
    diag = []
    r0 = 0
    c0 = 0
    while r0 < n_rows and c0 < n_cols:
        piv = None
        for i in range(r0, n_rows):
            for j in range(c0, n_cols):
                if mat[i][j] and (piv is None or abs(mat[i][j]) < abs(mat[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        mat[r0], mat[i] = mat[i], mat[r0]
        for row in mat:
            row[c0], row[j] = row[j], row[c0]
        p = mat[r0][c0]
        dirty = False
        for i in range(r0 + 1, n_rows):
            if mat[i][c0]:
                f = mat[i][c0] // p
                for j in range(c0, n_cols):
                    mat[i][j] -= f * mat[r0][j]
                if mat[i][c0]:
                    dirty = True
        for j in range(c0 + 1, n_cols):
            if mat[r0][j]:
                f = mat[r0][j] // p
                for i in range(r0, n_rows):
                    mat[i][j] -= f * mat[i][c0]
                if mat[r0][j]:
                    dirty = True
        if dirty:
            continue
        diag.append(abs(p))
        r0 += 1
        c0 += 1
    free_rank = n_rows - len(diag)
    finite = [d for d in diag if d > 1]
    return free_rank, sorted(finite)


# ---------------------------------------------------------------------------
# Small finite fields with table arithmetic.

_GF_TABLE_CAP = 4096


class GF:
    """F_{p^e} with dense multiplication/addition tables (small fields only).

    Elements are integers 0..p^e-1, base-p digit encoding of polynomials over
    F_p reduced modulo a monic irreducible of degree e.
    """

    def __init__(self, p: int, e: int):
        size = p**e
        if size > _GF_TABLE_CAP:
            raise BruteForceTooLarge(f"field of size {size} exceeds the table cap")
        self.p = p
        self.e = e
        self.size = size
        self._modulus = self._find_irreducible(p, e)
        self.add_table = [[0] * size for _ in range(size)]
        self.mul_table = [[0] * size for _ in range(size)]
        for x in range(size):
            dx = self._digits(x)
            for y in range(x, size):
                dy = self._digits(y)
                s = self._encode([(a + b) % p for a, b in zip(dx, dy)])
                self.add_table[x][y] = self.add_table[y][x] = s
                m = self._poly_mul(dx, dy)
                self.mul_table[x][y] = self.mul_table[y][x] = self._encode(m)
        self.neg_table = [self.scale(x, p - 1) for x in range(size)]
        self.inv_table = [0] * size
        for x in range(1, size):
            for y in range(1, size):
                if self.mul_table[x][y] == 1:
                    self.inv_table[x] = y
                    break
        self.generator = self._find_generator()

    @staticmethod
    def _find_irreducible(p: int, e: int):
        if e == 1:
            return [0, 1]
        # monic x^e + ... ; brute-force search by checking for roots and factors
        for tail in itertools.product(range(p), repeat=e):
            poly = list(tail) + [1]
            if GF._is_irreducible(poly, p):
                return poly
        raise RuntimeError("no irreducible polynomial found")

    @staticmethod
    def _is_irreducible(poly, p: int) -> bool:
        """Rabin test: x^(p^e) = x mod poly, and gcd(x^(p^(e/l)) - x, poly) = 1
        for every prime l dividing e."""
        e = len(poly) - 1

        def mulmod(a, b):
            out = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] = (out[i + j] + ai * bj) % p
            for i in range(len(out) - 1, e - 1, -1):
                c = out[i]
                if c:
                    out[i] = 0
                    for j in range(e):
                        out[i - e + j] = (out[i - e + j] - c * poly[j]) % p
            out = out[:e] + [0] * max(0, e - len(out))
            return [c % p for c in out[:e]]

        def powx(k):
            cur = ([0, 1] + [0] * (e - 2))[:e]
            for _ in range(k):
                acc = [1] + [0] * (e - 1)
                base = cur
                exp = p
                while exp:
                    if exp & 1:
                        acc = mulmod(acc, base)
                    base = mulmod(base, base)
                    exp >>= 1
                cur = acc
            return cur

        def poly_gcd_deg(a, b):
            a = [c % p for c in a]
            b = [c % p for c in b]
            while any(b):
                while b and b[-1] == 0:
                    b.pop()
                if not b:
                    break
                inv = pow(b[-1], -1, p)
                while True:
                    while a and a[-1] == 0:
                        a.pop()
                    if len(a) < len(b):
                        break
                    f = (a[-1] * inv) % p
                    shift = len(a) - len(b)
                    for i, c in enumerate(b):
                        a[i + shift] = (a[i + shift] - f * c) % p
                a, b = b, a
            while a and a[-1] == 0:
                a.pop()
            return len(a) - 1 if a else -1

        x_poly = ([0, 1] + [0] * (e - 2))[:e]
        if powx(e) != x_poly:
            return False
        for l in {l for l, _ in _factor_int(e)}:
            diff = [(a - b) % p for a, b in zip(powx(e // l), x_poly)]
            if poly_gcd_deg(diff + [0], list(poly)) != 0:
                return False
        return True

    def _digits(self, x: int):
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, digits):
        out = 0
        for d in reversed(digits[: self.e]):
            out = out * self.p + (d % self.p)
        return out

    def _poly_mul(self, dx, dy):
        p = self.p
        out = [0] * (2 * self.e - 1)
        for i, a in enumerate(dx):
            if a:
                for j, b in enumerate(dy):
                    out[i + j] = (out[i + j] + a * b) % p
        for i in range(len(out) - 1, self.e - 1, -1):
            c = out[i]
            if c:
                out[i] = 0
                for j in range(self.e):
                    out[i - self.e + j] = (out[i - self.e + j] - c * self._modulus[j]) % p
        return out[: self.e]

    def add(self, x, y):
        return self.add_table[x][y]

    def sub(self, x, y):
        return self.add_table[x][self.neg_table[y]]

    def mul(self, x, y):
        return self.mul_table[x][y]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError
        return self.inv_table[x]

    def neg(self, x):
        return self.neg_table[x]

    def scale(self, x, k: int):
        out = 0
        k %= self.p
        for _ in range(k):
            out = self.add_table[out][x]
        return out

    def pow(self, x, k: int):
        if k < 0:
            return self.pow(self.inv(x), -k)
        out = 1
        base = x
        while k:
            if k & 1:
                out = self.mul_table[out][base]
            base = self.mul_table[base][base]
            k >>= 1
        return out

    def _find_generator(self):
        order = self.size - 1
        primes = [p for p, _ in _factor_int(order)]
        for g in range(2, self.size):
            if all(self.pow(g, order // p) != 1 for p in primes):
                return g
        return 1

    def mult_order(self, x) -> int:
        if x == 0:
            raise ValueError
        order = self.size - 1
        for d in sorted(_divisors(order)):
            if self.pow(x, d) == 1:
                return d
        raise RuntimeError

    def subfield_elements(self, sub_size: int):
        """Elements fixed by x -> x^sub_size (the subfield of that size)."""
        return [x for x in range(self.size) if self.pow(x, sub_size) == x]


def _factor_int(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _divisors(n: int):
    out = [1]
    for p, a in _factor_int(n):
        out = [d * p**k for d in out for k in range(a + 1)]
    return sorted(out)


def _rep01(a: Fraction) -> Fraction:
    """Representative of a in Q/Z inside (0, 1]; the trivial class maps to 1."""
    r = a % 1
    return r if r else Fraction(1)


# ---------------------------------------------------------------------------
# Toric quotient stack data and cyclotomic inertia.


class ToricStackDatum:
    """[A^n / G] with G = G_m^k x prod mu_{d_i}, split over F_q, acting
    diagonally through the columns of an integer weight matrix with k + l rows.
    """

    def __init__(self, n: int, torus_rank: int, finite_orders, weights, q: int,
                 fiber: str = "origin"):
        self.n = n
        self.k = torus_rank
        self.finite_orders = list(finite_orders)
        self.l = len(self.finite_orders)
        self.weights = [list(map(int, row)) for row in weights]
        self.q = q
        self.fiber = fiber
        if len(self.weights) != self.k + self.l:
            raise ValueError("weight matrix must have torusRank + #finiteOrders rows")
        if any(len(row) != n for row in self.weights):
            raise ValueError("weight matrix must have n columns")
        fac = _factor_int(q)
        if len(fac) != 1:
            raise ValueError("q must be a prime power")
        self.p, self.e = fac[0]
        for d in self.finite_orders:
            if d < 1 or (q - 1) % d:
                raise NonSplitFiniteGroup(f"order {d} does not divide q - 1 = {q - 1}")
        if fiber != "origin":
            raise ValueError("only the origin fibre is supported")
        free, finite = self._stab_invariants(frozenset(range(n)))
        if free or finite:
            raise NotGenericallyRepresentable(
                "the generic point has a nontrivial stabilizer"
            )

    # stabilizer of a point with the given support, as the cokernel of the
    # relation columns d_i e_{k+i} and chi_j (j in the support)
    def _stab_invariants(self, support: frozenset):
        cols = []
        for i, d in enumerate(self.finite_orders):
            col = [0] * (self.k + self.l)
            col[self.k + i] = d
            cols.append(col)
        for j in sorted(support):
            cols.append([self.weights[r][j] for r in range(self.k + self.l)])
        return smith_invariants(cols, self.k + self.l)

    def _in_fiber(self, support: frozenset) -> bool:
        if not support:
            return True
        if self.k == 0:
            return False
        vectors = [[self.weights[r][j] for r in range(self.k)] for j in sorted(support)]
        return positive_functional_exists(vectors)

    def _field(self) -> GF:
        return GF(self.p, self.e)

    def fiber_orbits(self):
        """Orbit representatives and stabilizer data of G(F_q) acting on the
        F_q-points of the origin fibre.

        Returns a list of (representative point, orbit size, support).
        """
        cached = getattr(self, "_orbit_cache", None)
        if cached is not None:
            return cached
        if self.q**self.n > 2 * 10**6:
            raise StackyError(
                f"fibre enumeration over {self.q}^{self.n} points is out of reach"
            )
        gf = self._field()
        q = self.q
        g0 = gf.generator
        fiber_pts = []
        fiber_ok: dict[frozenset, bool] = {}
        for pt in itertools.product(range(q), repeat=self.n):
            supp = frozenset(j for j, c in enumerate(pt) if c)
            ok = fiber_ok.get(supp)
            if ok is None:
                ok = self._in_fiber(supp)
                fiber_ok[supp] = ok
            if ok:
                fiber_pts.append(pt)
        if not fiber_pts:
            raise NoBasePoint("the origin fibre has no rational points")
        generators = []
        for r in range(self.k):
            generators.append([gf.pow(g0, self.weights[r][j]) for j in range(self.n)])
        for i in range(self.l):
            zeta = gf.pow(g0, (q - 1) // self.finite_orders[i])
            generators.append(
                [gf.pow(zeta, self.weights[self.k + i][j]) for j in range(self.n)]
            )
        remaining = set(fiber_pts)
        orbits = []
        while remaining:
            rep = min(remaining)
            orbit = {rep}
            frontier = [rep]
            while frontier:
                cur = frontier.pop()
                for gen in generators:
                    nxt = tuple(gf.mul(gen[j], cur[j]) for j in range(self.n))
                    if nxt not in orbit:
                        orbit.add(nxt)
                        frontier.append(nxt)
            remaining -= orbit
            supp = frozenset(j for j, c in enumerate(rep) if c)
            orbits.append((rep, len(orbit), supp))
        self._orbit_cache = orbits
        return orbits


class InertiaPoint:
    """One F_q-class of the cyclotomic inertia stack: an orbit representative
    together with a homomorphism from mu_r into its stabilizer."""

    __slots__ = ("rep", "phi", "order", "weight", "alpha", "alpha_tilde",
                 "_free_rank", "_finite_factors", "_q")

    def __init__(self, rep, phi, order, weight, free_rank, finite_factors, q):
        self.rep = rep
        self.phi = phi
        self.order = order
        self.weight = weight
        self.alpha = Fraction(0)
        self.alpha_tilde = Fraction(0)
        self._free_rank = free_rank
        self._finite_factors = finite_factors
        self._q = q

    def aut_order(self, n: int = 1) -> ExactScalar:
        out = (q_power(n) - 1) ** self._free_rank
        c = 1
        for f in self._finite_factors:
            c *= math.gcd(f, self._q**n - 1)
        return out * c

    def __repr__(self):
        return (
            f"InertiaPoint(rep={self.rep}, phi={self.phi}, order={self.order}, "
            f"weight={self.weight})"
        )


def _stab_homs(datum: ToricStackDatum, support: frozenset, r: int):
    """Homomorphisms mu_r -> Stab as character vectors psi in (Z/r)^(k+l)
    vanishing on the relation columns (Cartier duality)."""
    kl = datum.k + datum.l
    if r**kl > 10**7:
        raise StackyError(f"too many candidate characters at r = {r}")
    cols = []
    for i, d in enumerate(datum.finite_orders):
        col = [0] * kl
        col[datum.k + i] = d
        cols.append(col)
    for j in sorted(support):
        cols.append([datum.weights[row][j] for row in range(kl)])
    out = []
    for psi in itertools.product(range(r), repeat=kl):
        if all(sum(p * c for p, c in zip(psi, col)) % r == 0 for col in cols):
            out.append(psi)
    return out


def inertia_points(datum: ToricStackDatum, r: int):
    """All F_q-classes of r-twisted points over the origin fibre, with their
    weights and automorphism orders."""
    if r < 1:
        raise ValueError("r must be positive")
    out = []
    stab_cache: dict[frozenset, tuple] = {}
    homs_cache: dict[frozenset, list] = {}
    for rep, _, supp in datum.fiber_orbits():
        if supp not in stab_cache:
            stab_cache[supp] = datum._stab_invariants(supp)
        free_rank, finite = stab_cache[supp]
        if supp not in homs_cache:
            homs_cache[supp] = _stab_homs(datum, supp, r)
        for psi in homs_cache[supp]:
            w = -Fraction(datum.k)
            for j in range(datum.n):
                c = sum(psi[row] * datum.weights[row][j] for row in range(datum.k + datum.l)) % r
                w += _rep01(Fraction(c, r))
            order = r // math.gcd(r, *([c for c in psi] or [0])) if any(psi) else 1
            out.append(InertiaPoint(rep, psi, order, w, free_rank, finite, datum.q))
    return out


def _fbar_value(point: InertiaPoint, fbar: str) -> ExactScalar:
    if fbar == "one":
        return ExactScalar.one()
    if fbar == "gerbe":
        return root_of_unity(point.alpha_tilde)
    raise ValueError(f"unknown admissible function {fbar!r}")


def volume_series(datum: ToricStackDatum, fbar: str = "one", order: int = 12) -> Series:
    """Generating series: coefficient of T^r is the weighted mass of the
    r-twisted points over the fibre, sum of fbar(y) q^{-w(y)} / |Aut(y)(F_q)|."""
    coeffs = []
    for r in range(1, order + 1):
        acc = ExactScalar.zero()
        for pt in inertia_points(datum, r):
            acc = acc + _fbar_value(pt, fbar) * q_power(-pt.weight) / pt.aut_order(1)
        coeffs.append(acc)
    return Series(coeffs)


def _stabilizer_exponent(datum: ToricStackDatum) -> int:
    out = 1
    for _, _, supp in datum.fiber_orbits():
        _, finite = datum._stab_invariants(supp)
        for f in finite:
            out = math.lcm(out, f)
    return out


def volume_fit(datum: ToricStackDatum, fbar: str = "one",
               delta_cap_factor: int = 16):
    """Fit the twisted-point series as a rational function.

    The denominator exponent starts at the lcm of the stabilizer exponents and
    doubles on fit failure up to the cap.
    """
    delta0 = _stabilizer_exponent(datum)
    big_d = datum.k + datum.l + 1
    delta = delta0
    last = None
    while delta <= delta0 * delta_cap_factor:
        order = delta * big_d + delta + 4
        series = volume_series(datum, fbar, order)
        try:
            return fit_rational(series, delta, big_d)
        except NoRationalFit as exc:
            last = exc
            delta *= 2
    raise last


def orbifold_volume(datum: ToricStackDatum, fbar: str = "one",
                    delta_cap_factor: int = 16) -> ExactScalar:
    """Minus the limit at T -> infinity of the fitted twisted-point series."""
    return -volume_fit(datum, fbar, delta_cap_factor).limit_at_infinity()


def dm_orbifold_sum(datum: ToricStackDatum) -> ExactScalar:
    """The finite orbifold sum over all twisted sectors, valid when every
    stabilizer on the fibre is finite: sum of q^{-w(y)} / |Aut(y)(F_q)|."""
    acc = ExactScalar.zero()
    for rep, _, supp in datum.fiber_orbits():
        free_rank, finite = datum._stab_invariants(supp)
        if free_rank:
            raise StackyError("fibre has a positive-dimensional stabilizer")
        exponent = 1
        for f in finite:
            exponent = math.lcm(exponent, f)
        # homomorphisms from the full profinite cyclic group = Hom(A, Q/Z),
        # enumerated at the exponent of A
        for psi in _stab_homs(datum, supp, exponent):
            w = -Fraction(datum.k)
            for j in range(datum.n):
                c = sum(psi[row] * datum.weights[row][j]
                        for row in range(datum.k + datum.l)) % exponent
                w += _rep01(Fraction(c, exponent))
            aut = 1
            for f in finite:
                aut *= math.gcd(f, datum.q - 1)
            acc = acc + q_power(-w) / aut
    return acc


# ---------------------------------------------------------------------------
# Weighted inertia of linear objects (vector-space variant).


def stacky_counting_function(monoid: LinearObjectsMonoid, grade_bound: int,
                             level_bound: int) -> CountingFunction:
    """The half-Lefschetz-shifted groupoid count as a counting function on the
    dimension lattice: the input to the plethystic logarithm."""
    return CountingFunction.from_callable(
        monoid, grade_bound, level_bound, lambda x, n: monoid.stacky_value(x, n)
    )


def _require_vect(monoid):
    if not isinstance(monoid, LinearObjectsMonoid) or not monoid.is_vect:
        raise UnsupportedAutGroup(
            "weighted inertia is implemented for the vector-space variant "
            "(automorphism groups a single general linear group)"
        )


def _compositions_positive(total: int, parts: int):
    if parts == 1:
        return [(total,)] if total >= 1 else []
    out = []
    for first in range(1, total - parts + 2):
        for rest in _compositions_positive(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def weighted_inertia_coefficient(monoid: LinearObjectsMonoid, x, n: int, r: int,
                                 mode: str = "differences") -> ExactScalar:
    """Parametrized weighted inertia mass at twist order r and level n.

    Classes are parametrized by a gerbe order m | r with a coprime residue d,
    an ordered tuple of nonzero summands (y_i) whose m-fold traces add to x,
    and a weight configuration in the region 0 < w_1 < ... < w_s <= 1/m; the
    per-class mass combines the gerbe root of unity e^{2 pi i d/m}, the sign
    from the modified gerbe function, exact q-powers from the weight function,
    and centralizer orders |GL| over the level-nm field.
    """
    _require_vect(monoid)
    conv = monoid.conv
    a = x[0] if isinstance(x, tuple) else int(x)
    if a == 0:
        return ExactScalar.zero()
    xx = monoid.euler_form((a,), (a,))
    total = ExactScalar.zero()
    for m in range(1, a + 1):
        if r % m or a % m:
            continue
        gerbe_sum = ExactScalar.zero()
        for d in range(1, m + 1):
            if math.gcd(d, m) == 1:
                gerbe_sum = gerbe_sum + root_of_unity(Fraction(d, m))
        assert xx % (m * m) == 0
        sign = (-1) ** ((conv.b1 * xx // (m * m)) % 2)
        w = a // m
        for s in range(1, w + 1):
            n_delta = delta_count(DeltaRegion(m, s), r, mode)
            if n_delta == 0:
                continue
            tuple_sum = ExactScalar.zero()
            for ys in _compositions_positive(w, s):
                e = Fraction(n * xx, 2) + Fraction(n * m * sum(y * y for y in ys), 2)
                mass = q_power(e)
                for y in ys:
                    mass = mass / gl_order(y, n * m)
                tuple_sum = tuple_sum + mass
            total = total + tuple_sum * gerbe_sum * sign * Fraction(n_delta, m * s)
    return total * (q_power(n) - 1)


def weighted_inertia_series(monoid: LinearObjectsMonoid, x, n: int, order: int,
                            path: str = "parametrized",
                            mode: str = "differences") -> Series:
    """Series of weighted inertia masses of the rigidified automorphism group
    of x over the level-n field, r = 1..order."""
    if path == "parametrized":
        return Series(
            [weighted_inertia_coefficient(monoid, x, n, r, mode) for r in range(1, order + 1)]
        )
    if path == "bruteforce":
        return Series(
            [weighted_inertia_coefficient_bruteforce(monoid, x, n, r)[0]
             for r in range(1, order + 1)]
        )
    raise ValueError(f"unknown path {path!r}")


class BruteForceClass:
    """A conjugacy class of r-torsion elements of the projective automorphism
    group, with the data entering the weighted count."""

    __slots__ = ("rep", "alpha", "alpha_order", "weight_fn", "centralizer_order", "euler")

    def __init__(self, rep, alpha, alpha_order, weight_fn, centralizer_order, euler):
        self.rep = rep
        self.alpha = alpha
        self.alpha_order = alpha_order
        self.weight_fn = weight_fn
        self.centralizer_order = centralizer_order
        self.euler = euler


def weighted_inertia_coefficient_bruteforce(monoid: LinearObjectsMonoid, x, n: int, r: int):
    """Weighted inertia mass at twist order r by explicit enumeration of the
    projective linear group over the level-n field.

    Requires r | q^n - 1 (so that mu_r is constant on the level-n field).
    Returns (coefficient, list of BruteForceClass).
    """
    _require_vect(monoid)
    conv = monoid.conv
    a = x[0] if isinstance(x, tuple) else int(x)
    q, p, e0 = monoid.q, *_factor_int(monoid.q)[0]
    qn = q**n
    if (qn - 1) % r:
        raise ValueError(f"brute force needs r | q^n - 1; got r={r}, q^n={qn}")
    if a == 0:
        return ExactScalar.zero(), []
    from .monoids import gl_order_int

    pgl_size = gl_order_int(a, qn) // (qn - 1)
    if pgl_size > 10**6:
        raise BruteForceTooLarge(f"|PGL_{a}(F_{qn})| = {pgl_size}")
    field = GF(p, e0 * n * r)
    sub = field.subfield_elements(qn)
    zeta_r = field.pow(field.generator, (field.size - 1) // r)
    xx = monoid.euler_form((a,), (a,))

    mats = _gl_matrices(field, sub, a)
    proj = _projective_classes(field, mats)
    torsion = []
    for g in proj:
        gr = _mat_pow(field, g, r)
        if _is_scalar(field, gr):
            torsion.append(g)
    classes = _conjugacy_classes(field, proj, torsion)

    total = ExactScalar.zero()
    infos = []
    for rep, _size in classes:
        c_scalar = _mat_pow(field, rep, r)[0][0]
        s = next(t for t in range(field.size) if t and field.pow(t, r) == field.inv(c_scalar))
        h = _mat_scale(field, rep, s)
        # eigen-dimensions of the r-torsion lift
        dims = {}
        for c in range(r):
            lam = field.pow(zeta_r, c)
            d = a - _mat_rank(field, _mat_sub_scalar(field, h, lam))
            if d:
                dims[c] = d
        assert sum(dims.values()) == a, "lift is not diagonalizable"
        w = Fraction(0)
        for c1, d1 in dims.items():
            for c2, d2 in dims.items():
                w -= d1 * d2 * _rep01(Fraction((c1 - c2) % r, r))
        # gerbe class: sigma(h) h^{-1} is the scalar sigma(s)/s in mu_r
        t = field.mul(field.pow(s, qn), field.inv(s))
        c_alpha = next(c for c in range(r) if field.pow(zeta_r, c) == t)
        alpha = Fraction(c_alpha, r) % 1
        o_alpha = alpha.denominator if alpha else 1
        assert xx % (o_alpha * o_alpha) == 0, "gerbe order squared must divide the pairing"
        sign = (-1) ** ((conv.b1 * xx // (o_alpha * o_alpha)) % 2)
        cent = _projective_centralizer_order(field, proj, rep)
        mass = (
            root_of_unity(alpha) * sign * q_power(-n * w) / cent
        )
        total = total + mass
        infos.append(BruteForceClass(rep, alpha, o_alpha, w, cent, xx))
    return total, infos


def _gl_matrices(field: GF, entries, a: int):
    out = []
    for flat in itertools.product(entries, repeat=a * a):
        m = tuple(tuple(flat[i * a + j] for j in range(a)) for i in range(a))
        if _mat_rank(field, m) == a:
            out.append(m)
    return out


def _projective_classes(field: GF, mats):
    seen = set()
    out = []
    for m in mats:
        canon = _projective_canon(field, m)
        if canon not in seen:
            seen.add(canon)
            out.append(canon)
    return out


def _projective_canon(field: GF, m):
    flat = [c for row in m for c in row]
    lead = next(c for c in flat if c)
    inv = field.inv(lead)
    return tuple(tuple(field.mul(inv, c) for c in row) for row in m)


def _mat_mul(field: GF, x, y):
    a = len(x)
    return tuple(
        tuple(
            _field_sum(field, [field.mul(x[i][t], y[t][j]) for t in range(a)])
            for j in range(a)
        )
        for i in range(a)
    )


def _field_sum(field: GF, xs):
    out = 0
    for x in xs:
        out = field.add(out, x)
    return out


def _mat_pow(field: GF, m, k: int):
    a = len(m)
    out = tuple(tuple(1 if i == j else 0 for j in range(a)) for i in range(a))
    base = m
    while k:
        if k & 1:
            out = _mat_mul(field, out, base)
        base = _mat_mul(field, base, base)
        k >>= 1
    return out

def _mat_scale(field: GF, m, s):
    return tuple(tuple(field.mul(s, c) for c in row) for row in m)


def _is_scalar(field: GF, m) -> bool:
    a = len(m)
    d = m[0][0]
    return all(m[i][j] == (d if i == j else 0) for i in range(a) for j in range(a))


def _mat_sub_scalar(field: GF, m, lam):
    a = len(m)
    return tuple(
        tuple(field.sub(m[i][j], lam if i == j else 0) for j in range(a)) for i in range(a)
    )


def _mat_rank(field: GF, m) -> int:
    rows = [list(r) for r in m]
    a = len(rows)
    cols = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    while rank < a and col < cols:
        piv = next((i for i in range(rank, a) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [field.mul(inv, c) for c in rows[rank]]
        for i in range(a):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [field.sub(c, field.mul(f, d)) for c, d in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _mat_inv(field: GF, m):
    a = len(m)
    rows = [list(r) + [1 if i == j else 0 for j in range(a)] for i, r in enumerate(m)]
    for col in range(a):
        piv = next(i for i in range(col, a) if rows[i][col])
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = field.inv(rows[col][col])
        rows[col] = [field.mul(inv, c) for c in rows[col]]
        for i in range(a):
            if i != col and rows[i][col]:
                f = rows[i][col]
                rows[i] = [field.sub(c, field.mul(f, d)) for c, d in zip(rows[i], rows[col])]
    return tuple(tuple(row[a:]) for row in rows)


def _conjugacy_classes(field: GF, group, subset):
    remaining = set(subset)
    out = []
    while remaining:
        rep = min(remaining)
        orbit = set()
        for z in group:
            zi = _mat_inv(field, z)
            conj = _projective_canon(field, _mat_mul(field, _mat_mul(field, z, rep), zi))
            orbit.add(conj)
        remaining -= orbit
        out.append((rep, len(orbit)))
    return out


def _projective_centralizer_order(field: GF, group, g) -> int:
    count = 0
    for z in group:
        zg = _mat_mul(field, z, g)
        gz = _mat_mul(field, g, z)
        if _projective_canon(field, zg) == _projective_canon(field, gz):
            count += 1
    return count


# ---------------------------------------------------------------------------
# The counting function from the limit formula, the identity residual, and
# quiver BPS invariants.


def bps_counting_function(monoid: LinearObjectsMonoid, x, level_bound: int,
                          mode: str = "differences") -> VolumeElem:
    """Counting-function value at x from minus the fitted limit of the
    weighted inertia series, normalized by half-Lefschetz powers."""
    _require_vect(monoid)
    conv = monoid.conv
    a = x[0] if isinstance(x, tuple) else int(x)
    if a == 0:
        return VolumeElem([0] * level_bound)
    xx = monoid.euler_form((a,), (a,))
    delta = math.lcm(*[m for m in range(1, a + 1) if a % m == 0])
    big_d = a + 1
    order = delta * big_d + delta + 2
    sign = -((-1) ** ((conv.b2 * xx) % 2))
    levels = []
    for n in range(1, level_bound + 1):
        series = weighted_inertia_series(monoid, (a,), n, order, "parametrized", mode)
        fit = fit_rational(series, delta, big_d)
        lim = fit.limit_at_infinity()
        levels.append(sign * half_l_power(-xx - 1, n, conv) * lim)
    return VolumeElem(levels)


class IdentityResidualReport:
    """Pointwise differences between the limit-formula counting function and
    the two plethystic-logarithm computations of the stacky counts."""

    def __init__(self, monoid, grade_bound, level_bound, mode, entries):
        self.monoid = monoid
        self.grade_bound = grade_bound
        self.level_bound = level_bound
        self.mode = mode
        self.entries = entries  # (x, n, lhs, log value, direct log value)

    @property
    def residuals(self):
        return [
            (x, n, lhs - lg, lg - lgd) for (x, n, lhs, lg, lgd) in self.entries
        ]

    def is_zero(self) -> bool:
        return all(d1.is_zero() and d2.is_zero() for _, _, d1, d2 in self.residuals)

    def max_abs_numeric(self, q0=2.0) -> float:
        out = 0.0
        for _, _, d1, d2 in self.residuals:
            out = max(out, abs(d1.eval_numeric(q0)), abs(d2.eval_numeric(q0)))
        return out

    def to_json(self):
        q0 = self.monoid.q
        return {
            "mode": self.mode,
            "grade_bound": self.grade_bound,
            "level_bound": self.level_bound,
            "q": q0,
            "identically_zero": self.is_zero(),
            "entries": [
                {
                    "element": list(x),
                    "level": n,
                    "limit_formula": str(lhs),
                    "limit_formula_at_q": lhs.eval_numeric(q0).real,
                    "pleth_log": str(lg),
                    "pleth_log_at_q": lg.eval_numeric(q0).real,
                    "log_direct": str(lgd),
                    "residual_zero": (lhs - lg).is_zero() and (lg - lgd).is_zero(),
                }
                for (x, n, lhs, lg, lgd) in self.entries
            ],
        }


def plethystic_identity_residual(monoid: LinearObjectsMonoid, grade_bound: int,
                                 level_bound: int,
                                 mode: str = "differences") -> IdentityResidualReport:
    """Compute both sides of the plethystic-logarithm identity independently
    and report all pointwise differences (never raises on mismatch).

    Left side: the limit-formula counting function divided by the difference
    of half-Lefschetz powers.  Right side: pleth_log of the stacky counts,
    and the direct Moebius formula as a second, independent evaluation.
    """
    _require_vect(monoid)
    conv = monoid.conv
    shifted = stacky_counting_function(monoid, grade_bound, grade_bound * level_bound)
    lg = pleth_log(shifted)
    lgd = log_direct(shifted)
    entries = []
    for a in range(1, grade_bound + 1):
        fx = bps_counting_function(monoid, (a,), level_bound, mode)
        for n in range(1, level_bound + 1):
            denom = half_l_power(1, n, conv) - half_l_power(-1, n, conv)
            lhs = fx.get(n) / denom
            entries.append(((a,), n, lhs, lg.value((a,), n), lgd.value((a,), n)))
    return IdentityResidualReport(monoid, grade_bound, level_bound, mode, entries)


class QuiverBPSResult:
    """Refined BPS invariants per dimension vector, as level-truncated volume
    elements."""

    def __init__(self, quiver, q, conv, gamma_bound, level_bound, per_gamma):
        self.quiver = quiver
        self.q = q
        self.conv = conv
        self.gamma_bound = gamma_bound
        self.level_bound = level_bound
        self.per_gamma = per_gamma  # dict gamma -> VolumeElem

    def omega(self, gamma) -> VolumeElem:
        return self.per_gamma[tuple(gamma)]

    def to_json(self):
        return {
            "gamma_bound": self.gamma_bound,
            "level_bound": self.level_bound,
            "invariants": [
                {"gamma": list(g), "levels": [str(v) for v in ve.levels]}
                for g, ve in sorted(self.per_gamma.items())
            ],
        }


def quiver_bps(quiver: Quiver, q: int, gamma_bound: int, level_bound: int,
               conv: HalfLConvention = DEFAULT_CONVENTION) -> QuiverBPSResult:
    """Extract refined BPS invariants of a symmetric quiver: apply the
    plethystic logarithm to the stacky counting function and multiply by the
    difference of half-Lefschetz powers."""
    monoid = LinearObjectsMonoid(quiver, q, conv)
    shifted = stacky_counting_function(monoid, gamma_bound, gamma_bound * level_bound)
    lg = pleth_log(shifted)
    out = {}
    for gamma in monoid.fixed_elements(1, gamma_bound):
        if sum(gamma) == 0:
            continue
        levels = []
        for n in range(1, level_bound + 1):
            denom = half_l_power(1, n, conv) - half_l_power(-1, n, conv)
            levels.append(lg.value(gamma, n) * denom)
        out[gamma] = VolumeElem(levels)
    return QuiverBPSResult(quiver, q, conv, gamma_bound, level_bound, out)


def verify_sym_roundtrip(quiver: Quiver, q: int, gamma_bound: int, level_bound: int,
                         conv: HalfLConvention = DEFAULT_CONVENTION) -> bool:
    """Sym applied to (BPS / half-Lefschetz difference) must reproduce the
    stacky counting function within truncation."""
    monoid = LinearObjectsMonoid(quiver, q, conv)
    big_n = gamma_bound * gamma_bound * level_bound
    shifted = stacky_counting_function(monoid, gamma_bound, big_n)
    lg = pleth_log(shifted)
    back = pleth_sym(lg)
    return back.agrees_with(
        shifted.restricted(level_bound=back.level_bound), gamma_bound, level_bound
    )


# ---------------------------------------------------------------------------
# Delta-count report (both modes, fitted limits, and the consistency verdict).


def delta_report(max_m: int = 3, max_s: int = 3, max_r: int = 24,
                 check_q: int = 3, check_level: int = 1) -> dict:
    """Tabulate both counting modes of the weight regions with their fitted
    limits, and determine empirically which mode is consistent with the
    brute-force weighted inertia count and the plethystic identity."""
    from .ehrhart import delta_limit

    table = []
    for m in range(1, max_m + 1):
        for s in range(1, max_s + 1):
            region = DeltaRegion(m, s)
            counts = {
                mode: [delta_count(region, r, mode) for r in range(1, max_r + 1)]
                for mode in ("differences", "orbits")
            }
            limits = {}
            for mode in ("differences", "orbits"):
                try:
                    limits[mode] = str(delta_limit(region, mode))
                except NoRationalFit:
                    limits[mode] = "no rational fit"
            table.append(
                {"m": m, "s": s, "counts": counts, "limits": limits}
            )
    # (q, r) pairs with r | q - 1; r = 4 is the first spot where the two
    # counting modes disagree, so q = 5 discriminates
    checks = [(check_q, 2), (5, 4)]
    verdict = {}
    for mode in ("differences", "orbits"):
        agree = True
        for q_chk, r_chk in checks:
            if (q_chk**check_level - 1) % r_chk:
                continue
            mon = LinearObjectsMonoid.vect(q_chk)
            brute, _ = weighted_inertia_coefficient_bruteforce(mon, (2,), check_level, r_chk)
            param = weighted_inertia_coefficient(mon, (2,), check_level, r_chk, mode)
            if brute.substitute_q(q_chk) != param.substitute_q(q_chk):
                agree = False
        monoid = LinearObjectsMonoid.vect(check_q)
        try:
            resid_zero = plethystic_identity_residual(monoid, 2, 1, mode).is_zero()
        except NoRationalFit:
            resid_zero = False
        verdict[mode] = {"bruteforce_match": agree, "identity_residual_zero": resid_zero}
    consistent = [m for m, v in verdict.items() if v["bruteforce_match"] and v["identity_residual_zero"]]
    determination = (
        "mode(s) consistent with the brute-force count and the plethystic "
        f"identity: {', '.join(consistent) if consistent else 'none'}; "
        "the differences parametrization is the convention under which the "
        "limit formula reproduces the identity, while the orbit count deviates "
        "as soon as weight translations have nontrivial stabilizers "
        "(first at m=1, s=2, r=4)."
    )
    return {"table": table, "verdict": verdict, "determination": determination}
