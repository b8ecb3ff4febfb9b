"""Exact arithmetic in the coefficient field generated by roots of unity and
rational powers of a formal variable q.

Values are fractions of Laurent "polynomials" in q^(1/N) whose coefficients
are cyclotomic numbers.  Cyclotomic numbers are stored on the prime-power
product basis: the roots of unity zeta^(k/d) whose component exponent at every
prime power p^a dividing d is < phi(p^a).  That basis is compatible across
conductors (the basis of Q(zeta_d) sits inside the basis of Q(zeta_M) for
d | M), so the normal form of a value never depends on the conductor history
and structural equality coincides with mathematical equality.

q never gets a numeric value during exact computation; `eval_numeric`
substitutes q -> q0 (positive real root for fractional exponents) and
zeta^a -> exp(2*pi*i*a) at the very end.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import lru_cache

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def format_rat(x: Fraction) -> str:
    """Serialize a rational as "p/q" in lowest terms, "p" when q = 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Fraction:
    return Fraction(s)


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
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
    return tuple(out)


@lru_cache(maxsize=None)
def _root_basis_expansion(a: Fraction) -> tuple[tuple[Fraction, int], ...]:
    """Expand the root of unity with exponent a (mod 1) over the basis.

    Returns ((basis exponent, +-1), ...).  The relation used at each prime
    power p^a is 1 + x^{p^{a-1}} + ... + x^{(p-1)p^{a-1}} = 0 for x = zeta_{p^a}
    restricted to exponents >= phi(p^a); a single pass lands in the basis.
    """
    a = a % 1
    d = a.denominator
    k = a.numerator
    parts = []
    for p, ap in _factor(d):
        pp = p**ap
        j = (k * pow(d // pp, -1, pp)) % pp
        phi = pp - pp // p
        if j < phi:
            parts.append(((Fraction(j, pp), 1),))
        else:
            t = j - phi
            step = pp // p
            parts.append(tuple((Fraction(t + i * step, pp), -1) for i in range(p - 1)))
    acc: dict[Fraction, int] = {}
    for combo in itertools.product(*parts):
        e = sum((c for c, _ in combo), ZERO) % 1
        s = 1
        for _, sg in combo:
            s *= sg
        acc[e] = acc.get(e, 0) + s
    return tuple(sorted((e, c) for e, c in acc.items() if c))


class CycNumber:
    """Element of the union of the cyclotomic fields Q(zeta_M), exact.

    Stored as a map {basis root exponent in [0,1) -> rational coefficient}.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Fraction, Fraction] | None = None):
        self.terms = {a: c for a, c in (terms or {}).items() if c}

    @staticmethod
    def from_rational(c) -> "CycNumber":
        c = Fraction(c)
        return CycNumber({ZERO: c} if c else {})

    @staticmethod
    def root(a) -> "CycNumber":
        terms: dict[Fraction, Fraction] = {}
        for e, s in _root_basis_expansion(Fraction(a)):
            terms[e] = terms.get(e, ZERO) + s
        return CycNumber(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ZERO in self.terms)

    def as_rational(self) -> Fraction:
        if not self.terms:
            return ZERO
        if self.is_rational():
            return self.terms[ZERO]
        raise ValueError(f"not a rational number: {self}")

    def conductor(self) -> int:
        m = 1
        for a in self.terms:
            m = m * a.denominator // math.gcd(m, a.denominator)
        return m

    def __add__(self, other: "CycNumber") -> "CycNumber":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, ZERO) + c
        return CycNumber(out)

    def __neg__(self) -> "CycNumber":
        return CycNumber({a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "CycNumber") -> "CycNumber":
        return self + (-other)

    def _times_root(self, b: Fraction, coeff: Fraction) -> dict[Fraction, Fraction]:
        out: dict[Fraction, Fraction] = {}
        for a, c in self.terms.items():
            for e, s in _root_basis_expansion(a + b):
                key = e
                out[key] = out.get(key, ZERO) + c * coeff * s
        return out

    def __mul__(self, other: "CycNumber") -> "CycNumber":
        if self.is_rational():
            c = self.as_rational()
            return CycNumber({a: c * d for a, d in other.terms.items()})
        if other.is_rational():
            return other * self
        out: dict[Fraction, Fraction] = {}
        for b, cb in other.terms.items():
            for a, contrib in self._times_root(b, cb).items():
                out[a] = out.get(a, ZERO) + contrib
        return CycNumber(out)

    def scale(self, c) -> "CycNumber":
        c = Fraction(c)
        return CycNumber({a: c * d for a, d in self.terms.items()})

    def galois(self, j: int) -> "CycNumber":
        """Apply the automorphism zeta -> zeta^j (j coprime to the conductor)."""
        out: dict[Fraction, Fraction] = {}
        for a, c in self.terms.items():
            for e, s in _root_basis_expansion(j * a):
                out[e] = out.get(e, ZERO) + c * s
        return CycNumber(out)

    def inv(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("cyclotomic division by zero")
        if self.is_rational():
            return CycNumber.from_rational(1 / self.as_rational())
        m = self.conductor()
        prod = CycNumber.from_rational(1)
        for j in range(2, m):
            if math.gcd(j, m) == 1:
                prod = prod * self.galois(j)
        norm = (self * prod).as_rational()
        return prod.scale(Fraction(1) / norm)

    def eval_complex(self) -> complex:
        return sum(
            (float(c) * cmath.exp(2j * math.pi * float(a)) for a, c in self.terms.items()),
            0j,
        )

    def key(self):
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, CycNumber) and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for a, c in sorted(self.terms.items()):
            if a == 0:
                bits.append(format_rat(c))
            elif c == 1:
                bits.append(f"z[{format_rat(a)}]")
            else:
                bits.append(f"{format_rat(c)}*z[{format_rat(a)}]")
        return " + ".join(bits)


_CYC_ONE = CycNumber.from_rational(1)

# ---------------------------------------------------------------------------
# Laurent-polynomial helpers.  A "poly" is a dict {q-exponent Fraction: CycNumber}.


def _padd(p1: dict, p2: dict) -> dict:
    out = dict(p1)
    for e, c in p2.items():
        s = out.get(e)
        s = c if s is None else s + c
        if s.is_zero():
            out.pop(e, None)
        else:
            out[e] = s
    return out


def _pneg(p: dict) -> dict:
    return {e: -c for e, c in p.items()}


def _pmul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            e = e1 + e2
            c = c1 * c2
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


def _int_poly(p: dict, n: int) -> dict[int, CycNumber]:
    return {int(e * n): c for e, c in p.items()}


def _poly_divmod(num: dict[int, CycNumber], den: dict[int, CycNumber]):
    """Long division of genuine (non-negative exponent) polynomials."""
    dd = max(den)
    lc_inv = den[dd].inv()
    rem = dict(num)
    quo: dict[int, CycNumber] = {}
    while rem and max(rem) >= dd:
        dn = max(rem)
        f = rem[dn] * lc_inv
        quo[dn - dd] = f
        for e, c in den.items():
            k = e + dn - dd
            s = rem.get(k, CycNumber()) - f * c
            if s.is_zero():
                rem.pop(k, None)
            else:
                rem[k] = s
    return quo, rem


def _poly_gcd(a: dict[int, CycNumber], b: dict[int, CycNumber]) -> dict[int, CycNumber]:
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    lc = a[max(a)].inv()
    return {e: c * lc for e, c in a.items()}


class ExactScalar:
    """Element of the field Q(roots of unity)(q^(1/N)), canonically normalized.

    Normal form: value = num/den where den is a polynomial in the smallest
    fractional power of q occurring, with nonzero lowest term normalized to 1,
    and gcd(num shifted to valuation 0, den) = 1.  The numerator absorbs any
    overall q-power shift as fractional exponents.  Uniqueness of the normal
    form makes == and hash mathematically meaningful.
    """

    __slots__ = ("num", "den", "_key")

    def __init__(self, num: dict, den: dict | None = None, _normalized: bool = False):
        if den is None:
            den = {ZERO: _CYC_ONE}
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._key = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rational(c) -> "ExactScalar":
        c = Fraction(c)
        num = {ZERO: CycNumber.from_rational(c)} if c else {}
        return ExactScalar(num, None, _normalized=True)

    @staticmethod
    def zero() -> "ExactScalar":
        return _ES_ZERO

    @staticmethod
    def one() -> "ExactScalar":
        return _ES_ONE

    @staticmethod
    def q_power(e) -> "ExactScalar":
        return ExactScalar({Fraction(e): _CYC_ONE}, None, _normalized=True)

    @staticmethod
    def root_of_unity(a) -> "ExactScalar":
        c = CycNumber.root(a)
        return ExactScalar({ZERO: c} if not c.is_zero() else {}, None, _normalized=True)

    @staticmethod
    def from_cyc(c: CycNumber) -> "ExactScalar":
        return ExactScalar({ZERO: c} if not c.is_zero() else {}, None, _normalized=True)

    # -- ring/field structure ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def _den_is_one(self) -> bool:
        return len(self.den) == 1 and ZERO in self.den and self.den[ZERO] == _CYC_ONE

    def __add__(self, other) -> "ExactScalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._den_is_one() and other._den_is_one():
            return ExactScalar(_padd(self.num, other.num), None, _normalized=True)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return ExactScalar(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(_pneg(self.num), self.den, _normalized=True)

    def __sub__(self, other) -> "ExactScalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ExactScalar":
        return _coerce(other) - self

    def __mul__(self, other) -> "ExactScalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._den_is_one() and other._den_is_one():
            return ExactScalar(_pmul(self.num, other.num), None, _normalized=True)
        return ExactScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("ExactScalar division by zero")
        return ExactScalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other) -> "ExactScalar":
        return _coerce(other) / self

    def __pow__(self, n: int) -> "ExactScalar":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return (ExactScalar.one() / self) ** (-n)
        out = ExactScalar.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def key(self):
        if self._key is None:
            self._key = (
                tuple(sorted((e, c.key()) for e, c in self.num.items())),
                tuple(sorted((e, c.key()) for e, c in self.den.items())),
            )
        return self._key

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # -- evaluation, substitution, display ------------------------------------

    def eval_numeric(self, q0) -> complex:
        """Substitute q -> q0 > 0 (real positive roots) and zeta^a -> e^{2 pi i a}."""
        q0 = float(q0)
        if q0 <= 0:
            raise ValueError("q0 must be positive")

        def ev(p: dict) -> complex:
            return sum(
                (c.eval_complex() * math.exp(e * math.log(q0)) for e, c in p.items()),
                0j,
            )

        return ev(self.num) / ev(self.den)

    def substitute_q(self, q0) -> "ExactScalar":
        """Exactly substitute the integer part of every q-power by q0 ** int.

        Fractional parts of exponents stay formal, so q^(5/2) at q0 = 3 becomes
        9 * q^(1/2).  Exact rational arithmetic throughout.
        """
        q0 = Fraction(q0)

        def sub(p: dict) -> dict:
            out: dict = {}
            for e, c in p.items():
                k = math.floor(e)
                frac = e - k
                cc = c.scale(q0**k)
                s = out.get(frac)
                s = cc if s is None else s + cc
                if s.is_zero():
                    out.pop(frac, None)
                else:
                    out[frac] = s
            return out

        return ExactScalar(sub(self.num), sub(self.den))

    def as_rational(self) -> Fraction:
        if self.is_zero():
            return ZERO
        if self._den_is_one() and len(self.num) == 1 and ZERO in self.num:
            return self.num[ZERO].as_rational()
        raise ValueError(f"not a rational constant: {self}")

    def q_exponents(self):
        """Exponents of q appearing in the (normalized) numerator/denominator."""
        return sorted(set(self.num) | set(self.den))

    def is_laurent(self) -> bool:
        """True when the denominator is trivial (value is a q-Laurent polynomial)."""
        return self._den_is_one()

    def __str__(self):
        if self.is_zero():
            return "0"
        num, den = self.num, self.den
        if not self._den_is_one():
            lead = den[max(den)]
            if lead.is_rational() and lead.as_rational() < 0:
                num = {e: -c for e, c in num.items()}
                den = {e: -c for e, c in den.items()}
        ns = _poly_str(num)
        if self._den_is_one():
            return ns
        return f"({ns}) / ({_poly_str(den)})"

    __repr__ = __str__

    # -- serialization --------------------------------------------------------

    def to_json(self):
        if self._den_is_one():
            return _poly_json(self.num)
        return {"num": _poly_json(self.num), "den": _poly_json(self.den)}

    @staticmethod
    def from_json(obj) -> "ExactScalar":
        if isinstance(obj, dict):
            return ExactScalar(_poly_from_json(obj["num"]), _poly_from_json(obj["den"]))
        return ExactScalar(_poly_from_json(obj))


def _coerce(x):
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar.from_rational(x)
    return NotImplemented


def _normalize(num: dict, den: dict):
    num = {e: c for e, c in num.items() if not c.is_zero()}
    den = {e: c for e, c in den.items() if not c.is_zero()}
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return {}, {ZERO: _CYC_ONE}
    if len(den) == 1:
        (ed, cd), = den.items()
        inv = cd.inv()
        return {e - ed: c * inv for e, c in num.items()}, {ZERO: _CYC_ONE}
    n = 1
    for e in itertools.chain(num, den):
        n = n * e.denominator // math.gcd(n, e.denominator)
    ni = _int_poly(num, n)
    di = _int_poly(den, n)
    vn, vd = min(ni), min(di)
    ni = {e - vn: c for e, c in ni.items()}
    di = {e - vd: c for e, c in di.items()}
    g = _poly_gcd(ni, di)
    if max(g) > 0:
        ni, r = _poly_divmod(ni, g)
        assert not r
        di, r = _poly_divmod(di, g)
        assert not r
    c0 = di[min(di)].inv()
    shift = Fraction(vn - vd, n)
    num_out = {Fraction(e, n) + shift: c * c0 for e, c in ni.items()}
    den_out = {Fraction(e, n): c * c0 for e, c in di.items()}
    return num_out, den_out


def _poly_str(p: dict) -> str:
    bits = []
    for e, c in sorted(p.items(), reverse=True):
        if e == 0:
            qs = ""
        elif e == 1:
            qs = "q"
        else:
            es = format_rat(e) if e.denominator == 1 else f"({format_rat(e)})"
            qs = f"q^{es}"
        if c.is_rational():
            r = c.as_rational()
            sign = "-" if r < 0 else "+"
            r = abs(r)
            if not qs:
                body = format_rat(r)
            elif r == 1:
                body = qs
            else:
                body = f"{format_rat(r)}*{qs}"
        else:
            sign = "+"
            body = f"({c!r})*{qs}" if qs else f"({c!r})"
        bits.append((sign, body))
    out = ""
    for i, (sign, body) in enumerate(bits):
        if i == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


def _poly_json(p: dict):
    out = []
    for e, c in sorted(p.items()):
        for a, coef in sorted(c.terms.items()):
            out.append({"zeta": format_rat(a), "qexp": format_rat(e), "coeff": [format_rat(coef)]})
    return out


def _poly_from_json(entries) -> dict:
    out: dict = {}
    for entry in entries:
        e = parse_rat(entry["qexp"])
        a = parse_rat(entry["zeta"])
        for cs in entry["coeff"]:
            c = CycNumber.root(a).scale(parse_rat(cs))
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


_ES_ZERO = ExactScalar({}, None, _normalized=True)
_ES_ONE = ExactScalar({ZERO: _CYC_ONE}, None, _normalized=True)


# ---------------------------------------------------------------------------
# Public operations.


def root_of_unity(a) -> ExactScalar:
    """The root of unity zeta^a for a in Q/Z; root_of_unity(a)*root_of_unity(b)
    equals root_of_unity(a+b) on the nose."""
    return ExactScalar.root_of_unity(a)


def q_power(e) -> ExactScalar:
    """The formal power q^e, e rational."""
    return ExactScalar.q_power(e)


class HalfLConvention:
    """Sign convention bits (b1, b2) for the square root of the Lefschetz class.

    The induced level sequence satisfies a_{mn} = (-1)^{b1 + b2*m} * a_n^m.
    Taking m = 1 forces b1 = b2, so only (0,0) and (1,1) are coherent for all
    m; mixed bits are accepted but satisfy the relation for m >= 2 only.
    Default (1,1) gives a_n = (-1)^(n+1) * q^(n/2), the convention under which
    all higher symmetric powers of the square root vanish.
    """

    __slots__ = ("b1", "b2")

    def __init__(self, b1: int = 1, b2: int = 1):
        if b1 not in (0, 1) or b2 not in (0, 1):
            raise ValueError("convention bits must be 0 or 1")
        self.b1 = b1
        self.b2 = b2

    def __repr__(self):
        return f"HalfLConvention(b1={self.b1}, b2={self.b2})"

    def __eq__(self, other):
        return (
            isinstance(other, HalfLConvention)
            and (self.b1, self.b2) == (other.b1, other.b2)
        )


DEFAULT_CONVENTION = HalfLConvention(1, 1)


def half_l_level(n: int, conv: HalfLConvention = DEFAULT_CONVENTION) -> ExactScalar:
    """Level-n component of the half Lefschetz class: sign * q^(n/2).

    Level 1 is pinned to q^(1/2); higher levels carry (-1)^(b1 + b2*n).
    """
    if n < 1:
        raise ValueError("level must be >= 1")
    sign = 1
    if n > 1 and (conv.b1 + conv.b2 * n) % 2 == 1:
        sign = -1
    return ExactScalar.q_power(Fraction(n, 2)) * sign


def half_l_power(j: int, n: int, conv: HalfLConvention = DEFAULT_CONVENTION) -> ExactScalar:
    """(half Lefschetz class)^j at level n, j any integer."""
    return half_l_level(n, conv) ** j


def eval_numeric(s: ExactScalar, q0) -> complex:
    return s.eval_numeric(q0)
