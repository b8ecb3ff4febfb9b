"""Concrete graded Galois monoids: discrete lattices, free orbit monoids built
from a Frobenius orbit census, and dimension-vector monoids of linear objects
(vector spaces, symmetric quiver representations) carrying automorphism
orders and the symmetric Euler pairing.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .lambdaring import mobius
from .scalar import DEFAULT_CONVENTION, ExactScalar, HalfLConvention, half_l_power, q_power


class MonoidError(Exception):
    pass


class NotSymmetric(MonoidError):
    """The quiver's Euler form is not symmetric."""


class GradedGaloisMonoid:
    """Capability surface shared by all instantiations.

    Elements are opaque handles owned by the monoid; any enumeration the
    lambda-ring layer needs (fixed elements, addition fibers, trace fibers)
    is delegated here.
    """

    def zero(self):
        raise NotImplementedError

    def key(self, x):
        return x

    def grading(self, x) -> tuple:
        raise NotImplementedError

    def grade(self, x) -> int:
        return sum(self.grading(x))

    def add(self, x, y):
        raise NotImplementedError

    def sub(self, x, y):
        """x - y, or None when y does not divide into x."""
        raise NotImplementedError

    def frobenius(self, x):
        raise NotImplementedError

    def is_fixed(self, x, n: int) -> bool:
        raise NotImplementedError

    def fixed_elements(self, n: int, grade_bound: int) -> list:
        raise NotImplementedError

    def trace(self, y, n: int, m: int):
        """Tr_{nm/n}(y): the sum of the m Frobenius^n translates of y."""
        out = y
        cur = y
        for _ in range(m - 1):
            cur = self._frobenius_power(cur, n)
            out = self.add(out, cur)
        return out

    def _frobenius_power(self, x, n: int):
        for _ in range(n):
            x = self.frobenius(x)
        return x

    def trace_fibers(self, x, n: int, m: int) -> list:
        """All level-nm fixed y with Tr_{nm/n}(y) = x."""
        gx = self.grade(x)
        if gx % m:
            return []
        return [
            y
            for y in self.fixed_elements(n * m, gx // m)
            if self.grade(y) * m == gx and self.key(self.trace(y, n, m)) == self.key(x)
        ]

    def add_fibers(self, x, n: int) -> list:
        """Ordered pairs of level-n fixed elements summing to x."""
        return [(a, b) for a, b in self._pairs(x, n)]

    def _pairs(self, x, n):
        for a in self.summands(x, n):
            b = self.sub(x, a)
            if b is not None and self.is_fixed(b, n):
                yield a, b

    def summands(self, x, n: int) -> list:
        """All level-n fixed elements y with y <= x (componentwise/multiset)."""
        raise NotImplementedError

    def decompositions(self, x, n: int, s: int) -> list:
        """All ordered s-tuples of level-n fixed elements summing to x
        (zero parts allowed)."""
        out = []

        def rec(rest, chosen, slots):
            if slots == 1:
                if self.is_fixed(rest, n):
                    out.append(tuple(chosen) + (rest,))
                return
            for y in self.summands(rest, n):
                r = self.sub(rest, y)
                chosen.append(y)
                rec(r, chosen, slots - 1)
                chosen.pop()

        rec(x, [], s)
        return out

    def __ne__(self, other):
        return not self.__eq__(other)


class DiscreteLattice(GradedGaloisMonoid):
    """N^rank with trivial Frobenius; counting functions are power series in
    rank variables, convolution is the series product."""

    def __init__(self, rank: int):
        self.rank = rank

    def zero(self):
        return (0,) * self.rank

    def grading(self, x):
        return x

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        out = tuple(a - b for a, b in zip(x, y))
        return out if all(a >= 0 for a in out) else None

    def frobenius(self, x):
        return x

    def is_fixed(self, x, n):
        return True

    def fixed_elements(self, n, grade_bound):
        out = []
        for total in range(grade_bound + 1):
            out.extend(_compositions(total, self.rank))
        return out

    def trace(self, y, n, m):
        return tuple(m * a for a in y)

    def trace_fibers(self, x, n, m):
        if any(a % m for a in x):
            return []
        return [tuple(a // m for a in x)]

    def summands(self, x, n):
        return [tuple(c) for c in itertools.product(*(range(a + 1) for a in x))]

    def __eq__(self, other):
        return isinstance(other, DiscreteLattice) and self.rank == other.rank

    def __hash__(self):
        return hash(("DiscreteLattice", self.rank))

    def __repr__(self):
        return f"DiscreteLattice(rank={self.rank})"


def _compositions(total, parts):
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def affine_line_census(q: int, max_degree: int) -> dict[int, int]:
    """Number of Frobenius orbits of each size d on the affine line over F_q
    (= count of monic irreducible polynomials of degree d)."""
    out = {}
    for d in range(1, max_degree + 1):
        total = sum(mobius(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
        out[d] = total // d
    return out


class FreeOrbitMonoid(GradedGaloisMonoid):
    """Free commutative monoid on a Galois set given by an orbit census.

    A geometric point is (orbit size d, orbit index, offset mod d); Frobenius
    shifts the offset.  Elements are finite multisets, stored as sorted
    tuples of ((d, i, o), multiplicity); the grading is the total size.
    """

    def __init__(self, census: dict[int, int]):
        self.census = dict(sorted(census.items()))

    def zero(self):
        return ()

    def grading(self, x):
        return (sum(mult for _, mult in x),)

    def add(self, x, y):
        acc = dict(x)
        for p, m in y:
            acc[p] = acc.get(p, 0) + m
        return tuple(sorted(acc.items()))

    def sub(self, x, y):
        acc = dict(x)
        for p, m in y:
            acc[p] = acc.get(p, 0) - m
            if acc[p] < 0:
                return None
            if acc[p] == 0:
                del acc[p]
        return tuple(sorted(acc.items()))

    def frobenius(self, x):
        acc: dict = {}
        for (d, i, o), m in x:
            p = (d, i, (o + 1) % d)
            acc[p] = acc.get(p, 0) + m
        return tuple(sorted(acc.items()))

    def _frobenius_power(self, x, n):
        acc: dict = {}
        for (d, i, o), m in x:
            p = (d, i, (o + n) % d)
            acc[p] = acc.get(p, 0) + m
        return tuple(sorted(acc.items()))

    def is_fixed(self, x, n):
        return self._frobenius_power(x, n) == x

    def point(self, d: int, i: int, o: int = 0):
        """Singleton multiset; a geometric point of the underlying set."""
        if d not in self.census or not 0 <= i < self.census[d]:
            raise ValueError(f"no orbit ({d}, {i}) in the census")
        return (((d, i, o % d), 1),)

    def atoms(self, n: int, grade_bound: int):
        """Level-n 'atoms': the Frobenius^n orbits of geometric points, as
        irreducible level-n fixed multisets, of grade <= grade_bound."""
        out = []
        for d, count in self.census.items():
            g = math.gcd(d, n)
            size = d // g
            if size > grade_bound:
                continue
            for i in range(count):
                for c in range(g):
                    pts = tuple(sorted(((d, i, (c + j * n) % d), 1) for j in range(size)))
                    out.append(pts)
        return out

    def fixed_elements(self, n, grade_bound):
        atoms = self.atoms(n, grade_bound)
        sizes = [self.grade(a) for a in atoms]
        out = []

        def rec(idx, current, budget):
            out.append(current)
            for k in range(idx, len(atoms)):
                if sizes[k] <= budget:
                    rec(k, self.add(current, atoms[k]), budget - sizes[k])

        rec(0, (), grade_bound)
        # deduplicate (atoms are disjoint, so no duplicates arise; keep sorted)
        return sorted(set(out))

    def summands(self, x, n):
        ranges = [range(m + 1) for _, m in x]
        pts = [p for p, _ in x]
        out = []
        for mults in itertools.product(*ranges):
            y = tuple((p, m) for p, m in zip(pts, mults) if m)
            if self.is_fixed(y, n):
                out.append(y)
        return out

    def __eq__(self, other):
        return isinstance(other, FreeOrbitMonoid) and self.census == other.census

    def __hash__(self):
        return hash(("FreeOrbitMonoid", tuple(sorted(self.census.items()))))

    def __repr__(self):
        return f"FreeOrbitMonoid({self.census})"


class Quiver:
    """A finite quiver with arrow multiplicities; (i, j) -> count."""

    def __init__(self, vertices: int, arrows=None):
        self.vertices = vertices
        self.arrows: dict[tuple[int, int], int] = {}
        if isinstance(arrows, dict):
            items = [(i, j, c) for (i, j), c in arrows.items()]
        else:
            items = [tuple(e) for e in (arrows or [])]
        for i, j, c in items:
            if not (0 <= i < vertices and 0 <= j < vertices):
                raise ValueError(f"arrow endpoint out of range: {(i, j)}")
            if c:
                self.arrows[(i, j)] = self.arrows.get((i, j), 0) + c

    @staticmethod
    def from_json(obj) -> "Quiver":
        return Quiver(obj["vertices"], [tuple(a) for a in obj.get("arrows", [])])

    def arrow_count(self, i: int, j: int) -> int:
        return self.arrows.get((i, j), 0)

    def is_symmetric(self) -> bool:
        return all(
            self.arrow_count(i, j) == self.arrow_count(j, i)
            for i in range(self.vertices)
            for j in range(self.vertices)
        )

    def key(self):
        return (self.vertices, tuple(sorted(self.arrows.items())))

    def __repr__(self):
        return f"Quiver(vertices={self.vertices}, arrows={sorted(self.arrows.items())})"


def gl_order(a: int, n: int) -> ExactScalar:
    """|GL_a(F_{q^n})| as a symbolic polynomial in q."""
    out = q_power(Fraction(n * a * (a - 1), 2))
    for i in range(1, a + 1):
        out = out * (q_power(n * i) - 1)
    return out


def gl_order_int(a: int, qn: int) -> int:
    out = qn ** (a * (a - 1) // 2)
    for i in range(1, a + 1):
        out *= qn**i - 1
    return out


class LinearObjectsMonoid(GradedGaloisMonoid):
    """Dimension vectors of linear objects with trivial Frobenius.

    Variants: plain vector spaces (one vertex, no arrows) and representations
    of a symmetric quiver.  Carries the automorphism orders |GL_gamma(F_{q^n})|,
    the symmetric Euler pairing, and the stacky point-count values used as
    input to the plethystic logarithm.
    """

    def __init__(self, quiver: Quiver, q: int, conv: HalfLConvention = DEFAULT_CONVENTION):
        if not quiver.is_symmetric():
            raise NotSymmetric(f"quiver has a non-symmetric Euler form: {quiver}")
        if q < 2:
            raise ValueError("q must be a prime power >= 2")
        self.quiver = quiver
        self.q = q
        self.conv = conv
        self._lattice = DiscreteLattice(quiver.vertices)

    @staticmethod
    def vect(q: int, conv: HalfLConvention = DEFAULT_CONVENTION) -> "LinearObjectsMonoid":
        return LinearObjectsMonoid(Quiver(1), q, conv)

    @property
    def is_vect(self) -> bool:
        return self.quiver.vertices == 1 and not self.quiver.arrows

    # lattice structure (trivial Frobenius)
    def zero(self):
        return (0,) * self.quiver.vertices

    def grading(self, x):
        return x

    def add(self, x, y):
        return self._lattice.add(x, y)

    def sub(self, x, y):
        return self._lattice.sub(x, y)

    def frobenius(self, x):
        return x

    def is_fixed(self, x, n):
        return True

    def fixed_elements(self, n, grade_bound):
        return self._lattice.fixed_elements(n, grade_bound)

    def trace(self, y, n, m):
        return tuple(m * a for a in y)

    def trace_fibers(self, x, n, m):
        return self._lattice.trace_fibers(x, n, m)

    def summands(self, x, n):
        return self._lattice.summands(x, n)

    # linear-objects payload
    def euler_form(self, x, y) -> int:
        out = sum(a * b for a, b in zip(x, y))
        for (i, j), c in self.quiver.arrows.items():
            out -= c * x[i] * y[j]
        return out

    def aut_order(self, x, n: int) -> ExactScalar:
        out = ExactScalar.one()
        for a in x:
            out = out * gl_order(a, n)
        return out

    def aut_order_int(self, x, n: int) -> int:
        qn = self.q**n
        out = 1
        for a in x:
            out *= gl_order_int(a, qn)
        return out

    def rep_space_order(self, x, n: int) -> ExactScalar:
        e = sum(c * x[i] * x[j] for (i, j), c in self.quiver.arrows.items())
        return q_power(n * e)

    def stacky_value(self, x, n: int) -> ExactScalar:
        """Half-Lefschetz-shifted groupoid count of representations of
        dimension vector x over the level-n field."""
        shift = half_l_power(self.euler_form(x, x), n, self.conv)
        return shift * self.rep_space_order(x, n) / self.aut_order(x, n)

    def __eq__(self, other):
        return (
            isinstance(other, LinearObjectsMonoid)
            and self.quiver.key() == other.quiver.key()
            and self.q == other.q
            and self.conv == other.conv
        )

    def __hash__(self):
        return hash(("LinearObjectsMonoid", self.quiver.key(), self.q,
                      self.conv.b1, self.conv.b2))

    def __repr__(self):
        tag = "Vect" if self.is_vect else "SymmetricQuiver"
        return f"LinearObjectsMonoid({tag}, q={self.q})"


# ---------------------------------------------------------------------------
# Morphisms used by the pushforward/pullback layer.


class IdentityMorphism:
    sigma_finite = True
    full_injective = True

    def __init__(self, monoid):
        self.source = monoid
        self.target = monoid

    def map(self, x):
        return x

    def preimage(self, x):
        return x


class GradingMorphism:
    """Total-grade map onto the rank-1 discrete lattice; sigma-finite fibers."""

    sigma_finite = True
    full_injective = False

    def __init__(self, source):
        self.source = source
        self.target = DiscreteLattice(1)

    def map(self, x):
        return (self.source.grade(x),)

    def fibers(self, y, n: int):
        g = y[0]
        return [x for x in self.source.fixed_elements(n, g) if self.source.grade(x) == g]


class AxisInclusion:
    """Rank-1 lattice into a higher-rank lattice along one axis; the image is
    a full submonoid, so pullback is a lambda-ring homomorphism."""

    sigma_finite = True
    full_injective = True

    def __init__(self, target: DiscreteLattice, axis: int = 0):
        self.source = DiscreteLattice(1)
        self.target = target
        self.axis = axis

    def map(self, x):
        out = [0] * self.target.rank
        out[self.axis] = x[0]
        return tuple(out)

    def preimage(self, y):
        if all(c == 0 for i, c in enumerate(y) if i != self.axis):
            return (y[self.axis],)
        return None
