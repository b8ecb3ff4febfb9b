"""Shared test utilities: random scalars, random counting functions, and the
independent truncated Euler-product oracle for quiver BPS invariants."""

from fractions import Fraction

from stacky_volumes.lambdaring import CountingFunction, mobius
from stacky_volumes.monoids import FreeOrbitMonoid
from stacky_volumes.scalar import (
    DEFAULT_CONVENTION,
    ExactScalar,
    half_l_level,
    half_l_power,
    q_power,
    root_of_unity,
)


def random_scalar(rng, with_roots=False) -> ExactScalar:
    c = rng.randint(-3, 3)
    if c == 0:
        c = 1
    e = rng.choice([0, 1, -1, Fraction(1, 2)])
    out = ExactScalar.from_rational(c) * q_power(e)
    if with_roots and rng.random() < 0.3:
        out = out * root_of_unity(Fraction(1, rng.choice([2, 3, 4])))
    return out


def random_fixed_element(monoid, rng, n, grade_bound):
    if isinstance(monoid, FreeOrbitMonoid):
        atoms = monoid.atoms(n, grade_bound)
        x = monoid.zero()
        budget = grade_bound
        for _ in range(rng.randint(1, grade_bound)):
            options = [a for a in atoms if monoid.grade(a) <= budget]
            if not options:
                break
            a = rng.choice(options)
            x = monoid.add(x, a)
            budget -= monoid.grade(a)
        return x
    rank = len(monoid.zero())
    total = rng.randint(1, grade_bound)
    out = [0] * rank
    for _ in range(total):
        out[rng.randrange(rank)] += 1
    return tuple(out)


def random_counting_function(monoid, rng, grade_bound, level_bound,
                             per_level=3, with_roots=False) -> CountingFunction:
    """Sparse random function vanishing at the zero element."""
    f = CountingFunction(monoid, grade_bound, level_bound)
    for n in range(1, level_bound + 1):
        for _ in range(per_level):
            x = random_fixed_element(monoid, rng, n, grade_bound)
            if monoid.grade(x) == 0:
                continue
            f.set(x, n, random_scalar(rng, with_roots))
    return f


def _divisors(a):
    return [m for m in range(1, a + 1) if a % m == 0]


def oracle_zero_arrow_omega(a: int, level: int, conv=DEFAULT_CONVENTION) -> ExactScalar:
    """BPS invariant of the arrowless one-vertex quiver from the Euler product
    prod_{k>=1} (1 + z q^(1/2-k)): plethystic log with closed-form k-sums.

    Levelwise, log of the product has z^s-coefficient
    (-1)^(s-1)/s * (L^(1/2))^s / (L^s - 1); Adams twists dilate the level and
    raise z-degree, and the Moebius sum assembles the plethystic log.
    """
    acc = ExactScalar.zero()
    for m in _divisors(a):
        s = a // m
        sign = mobius(m) * (-1) ** (s - 1)
        term = half_l_power(s, m * level, conv) / (q_power(a * level) - 1)
        acc = acc + term * Fraction(sign, a)
    return acc * (half_l_level(level, conv) - half_l_power(-1, level, conv))


def oracle_one_loop_omega(a: int, level: int, conv=DEFAULT_CONVENTION) -> ExactScalar:
    """BPS invariant of the one-loop quiver from the Euler product
    prod_{k>=0} (1 - z q^(-k))^(-1)."""
    acc = ExactScalar.zero()
    for m in _divisors(a):
        term = q_power(a * level) / (q_power(a * level) - 1)
        acc = acc + term * Fraction(mobius(m), a)
    return acc * (half_l_level(level, conv) - half_l_power(-1, level, conv))
