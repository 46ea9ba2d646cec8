"""Exact and certified numerics.

Rationals are :class:`fractions.Fraction`.  Quadratic irrationals are
:class:`QuadraticSurd`, compared exactly inside one field and by interval
refinement across fields.  :class:`CertifiedReal` is a closed interval with
rational endpoints; :func:`certified_log`, :func:`certified_exp` and
:func:`lambert_w` return such intervals with rigorous (outward rounded)
error bounds computed in fixed-point integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import mpmath

from .errors import DomainError, FieldMismatch, PrecisionExhausted

__all__ = [
    "Ordering",
    "QuadraticSurd",
    "CertifiedReal",
    "ExpThreshold",
    "as_fraction",
    "surd_compare",
    "compare",
    "certified_log",
    "certified_exp",
    "certified_e",
    "lambert_w",
    "rational_to_json",
    "rational_from_json",
]

MAX_REFINE_BITS = 1 << 16


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def rational_to_json(q) -> dict:
    q = as_fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rational_from_json(obj) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


# ---------------------------------------------------------------------------
# square-free parts

def _small_primes(limit):
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, ok in enumerate(sieve) if ok]


_PRIMES = _small_primes(5000)


@lru_cache(maxsize=4096)
def _square_split(d: int) -> tuple[int, int]:
    """Return (k, core) with d = k*k*core.

    Square factors are removed by trial division over small primes and a
    final perfect-square test, so the core is squarefree unless d carries the
    square of a prime above the trial limit.  Equal values still compare
    equal in that case because comparisons rationalize across radicands.
    """
    k = 1
    core = d
    for p in _PRIMES:
        pp = p * p
        if pp > core:
            break
        while core % pp == 0:
            core //= pp
            k *= p
    r = isqrt(core)
    if r * r == core:
        return k * r, 1
    return k, core


# ---------------------------------------------------------------------------
# quadratic surds

def _coerce(x):
    if isinstance(x, QuadraticSurd):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadraticSurd.from_rational(x)
    return NotImplemented


@dataclass(frozen=True, eq=False)
class QuadraticSurd:
    """The real number (a + b*sqrt(d)) / c in normalized form."""

    a: int
    b: int = 0
    c: int = 1
    d: int = 0

    def __post_init__(self):
        a, b, c, d = int(self.a), int(self.b), int(self.c), int(self.d)
        if c == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if d < 0:
            raise DomainError("negative radicand")
        if b != 0 and d > 1:
            k, d = _square_split(d)
            b *= k
            if d == 1:
                a, b, d = a + b, 0, 0
        elif d == 1:
            a, b, d = a + b, 0, 0
        if b == 0 or d == 0:
            b, d = 0, 0
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(a, b), c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    # construction -----------------------------------------------------
    @classmethod
    def from_rational(cls, q) -> "QuadraticSurd":
        q = as_fraction(q)
        return cls(q.numerator, 0, q.denominator, 0)

    @classmethod
    def sqrt(cls, n) -> "QuadraticSurd":
        """sqrt of a nonnegative rational n."""
        q = as_fraction(n)
        if q < 0:
            raise DomainError("sqrt of a negative number")
        # sqrt(p/s) = sqrt(p*s)/s
        return cls(0, 1, q.denominator, q.numerator * q.denominator)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational_value(self) -> Fraction:
        if self.b:
            raise ValueError("surd is irrational")
        return Fraction(self.a, self.c)

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.a, -self.b, self.c, self.d)

    # field alignment --------------------------------------------------
    def _aligned(self, other: "QuadraticSurd"):
        """Rewrite both operands over a common radicand, or raise."""
        if self.b == 0 or other.b == 0 or self.d == other.d:
            d = self.d or other.d
            return (self.a, self.b, self.c), (other.a, other.b, other.c), d
        prod = self.d * other.d
        root = isqrt(prod)
        if root * root != prod:
            raise FieldMismatch(f"sqrt({self.d}) and sqrt({other.d}) span different fields")
        # sqrt(d2) = root / sqrt(d1) = (root/d1) sqrt(d1)
        d = self.d
        return (
            (self.a, self.b, self.c),
            (other.a * d, other.b * root, other.c * d),
            d,
        )

    # arithmetic -------------------------------------------------------
    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.c, self.d)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        (a1, b1, c1), (a2, b2, c2), d = self._aligned(other)
        return QuadraticSurd(a1 * c2 + a2 * c1, b1 * c2 + b2 * c1, c1 * c2, d)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        (a1, b1, c1), (a2, b2, c2), d = self._aligned(other)
        return QuadraticSurd(a1 * a2 + b1 * b2 * d, a1 * b2 + a2 * b1, c1 * c2, d)

    __rmul__ = __mul__

    def reciprocal(self) -> "QuadraticSurd":
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return QuadraticSurd(self.c * self.a, -self.c * self.b, norm, self.d)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    # ordering ---------------------------------------------------------
    def sign(self) -> int:
        return _sign_a_plus_b_sqrt_d(self.a, self.b, self.d)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return surd_compare(self, other) == Ordering.EQ

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    # approximation ----------------------------------------------------
    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational lo <= value <= hi with hi - lo <= 2**-bits * 2 / c."""
        scale = 1 << bits
        if self.b == 0:
            q = Fraction(self.a, self.c)
            return q, q
        s = isqrt(self.b * self.b * self.d * scale * scale)  # floor(|b| sqrt(d) 2^bits)
        if self.b > 0:
            lo_n, hi_n = s, s + 1
        else:
            lo_n, hi_n = -s - 1, -s
        base = self.a * scale
        return Fraction(base + lo_n, self.c * scale), Fraction(base + hi_n, self.c * scale)

    def certified(self, bits: int = 64) -> "CertifiedReal":
        lo, hi = self.enclosure(bits + max(0, self.c.bit_length()))
        return CertifiedReal(lo, hi, bits)

    def __float__(self):
        if self.b == 0:
            return self.a / self.c
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"QuadraticSurd(a={self.a}, b={self.b}, c={self.c}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.c))
        num = f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt({self.d})"
        return num if self.c == 1 else f"({num})/{self.c}"

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "c": str(self.c), "d": str(self.d)}

    @classmethod
    def from_json(cls, obj) -> "QuadraticSurd":
        return cls(int(obj["a"]), int(obj["b"]), int(obj["c"]), int(obj["d"]))


def _sign_a_plus_b_sqrt_d(a: int, b: int, d: int) -> int:
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0 or d == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    lhs = a * a
    rhs = b * b * d
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def surd_compare(x, y) -> Ordering:
    """Exact ordering of two surds (or rationals)."""
    x = _coerce(x)
    y = _coerce(y)
    try:
        diff = x - y
    except FieldMismatch:
        return _refine_compare(x, y)
    return Ordering(diff.sign())


# ---------------------------------------------------------------------------
# certified reals

def _floor_div_pow2(n: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(n * (1 << bits)), 1 << bits)


def _ceil_div_pow2(n: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(n * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class CertifiedReal:
    """A real number known to lie in the closed interval [lo, hi]."""

    lo: Fraction
    hi: Fraction
    precision_bits: int = 0

    def __post_init__(self):
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, q, bits: int = 0) -> "CertifiedReal":
        q = as_fraction(q)
        return cls(q, q, bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid)

    def contains(self, x) -> bool:
        if isinstance(x, CertifiedReal):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, QuadraticSurd):
            return compare(self.lo, x) <= 0 <= compare(self.hi, x)
        return self.lo <= as_fraction(x) <= self.hi

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    def rounded(self, bits: int) -> "CertifiedReal":
        """Outward rounding of both endpoints to the 2**-bits grid."""
        return CertifiedReal(_floor_div_pow2(self.lo, bits), _ceil_div_pow2(self.hi, bits), self.precision_bits)

    def _bits_with(self, other) -> int:
        ob = other.precision_bits if isinstance(other, CertifiedReal) else self.precision_bits
        return min(self.precision_bits, ob)

    @staticmethod
    def _lift(x) -> "CertifiedReal":
        if isinstance(x, CertifiedReal):
            return x
        if isinstance(x, QuadraticSurd):
            return x.certified(96)
        return CertifiedReal.exact(x)

    def __neg__(self):
        return CertifiedReal(-self.hi, -self.lo, self.precision_bits)

    def __add__(self, other):
        o = self._lift(other)
        return CertifiedReal(self.lo + o.lo, self.hi + o.hi, self._bits_with(other))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return CertifiedReal(self.lo - o.hi, self.hi - o.lo, self._bits_with(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return CertifiedReal(min(prods), max(prods), self._bits_with(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * CertifiedReal(1 / o.hi, 1 / o.lo, o.precision_bits)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def to_json(self) -> dict:
        return {
            "lo": rational_to_json(self.lo),
            "hi": rational_to_json(self.hi),
            "precision_bits": self.precision_bits,
            "approx": float(self.mid),
        }

    @classmethod
    def from_json(cls, obj) -> "CertifiedReal":
        return cls(rational_from_json(obj["lo"]), rational_from_json(obj["hi"]), int(obj["precision_bits"]))


# ---------------------------------------------------------------------------
# fixed-point kernels (values are integers scaled by 2**P)

def _atanh_fixed(p: int, q: int, P: int) -> tuple[int, int]:
    """atanh(p/q) * 2**P for 0 <= p/q <= 1/2, as (value, error bound)."""
    if p == 0:
        return 0, 0
    pp, qq = p * p, q * q
    t = (p << P) // q
    total = t
    k = 0
    while t:
        k += 1
        t = t * pp // qq
        total += t // (2 * k + 1)
    # every floor underestimates by at most 3 units; the tail is below 4 units
    return total, 3 * k + 5


@lru_cache(maxsize=256)
def _log2_fixed(P: int) -> tuple[int, int]:
    v, e = _atanh_fixed(1, 3, P)
    return 2 * v, 2 * e


@lru_cache(maxsize=8192)
def _log_int_fixed(n: int, P: int) -> tuple[int, int]:
    """log(n) * 2**P for a positive integer n, as (value, error bound)."""
    if n == 1:
        return 0, 0
    e = n.bit_length() - 1
    base = 1 << e
    v, err = _atanh_fixed(n - base, n + base, P)
    v, err = 2 * v, 2 * err
    if e:
        l2, l2err = _log2_fixed(P)
        v += e * l2
        err += e * l2err
    return v, err


def _exp_fixed_nonneg(x: Fraction, P: int) -> tuple[int, int]:
    """Enclosure [L, H] of exp(x) * 2**P for rational x >= 0."""
    if x == 0:
        one = 1 << P
        return one, one
    # halve the argument s times so the Taylor series sees x / 2**s < 1/4
    s = max(0, x.numerator.bit_length() - x.denominator.bit_length() + 3)
    num = x.numerator
    den = x.denominator << s
    t = 1 << P
    total = t
    k = 0
    while t:
        k += 1
        t = t * num // (den * k)
        total += t
    lo = total
    hi = total + 2 * k + 2
    for _ in range(s):
        lo = (lo * lo) >> P
        hi = -((-hi * hi) >> P)
    return lo, hi


def _as_interval(x, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, CertifiedReal):
        return x.lo, x.hi
    if isinstance(x, QuadraticSurd):
        return x.enclosure(bits + 8)
    q = as_fraction(x)
    return q, q


def _log_rational(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if q <= 0:
        raise DomainError("log of a nonpositive number")
    if q == 1:
        return Fraction(0), Fraction(0)
    n, m = q.numerator, q.denominator
    target = Fraction(1, 1 << bits)
    guard = 16 + max(n.bit_length(), m.bit_length()).bit_length()
    P = bits + guard
    while True:
        v1, e1 = _log_int_fixed(n, P)
        v2, e2 = _log_int_fixed(m, P)
        v, err = v1 - v2, e1 + e2
        lo, hi = Fraction(v - err, 1 << P), Fraction(v + err, 1 << P)
        if hi - lo < target:
            return lo, hi
        P += 32


def certified_log(x, precision_bits: int = 64) -> CertifiedReal:
    """Enclosure of log(x) of width < 2**-precision_bits.

    ``x`` may be a positive rational, a positive surd or a CertifiedReal with
    positive lower end; for interval input the output width also carries the
    input width.
    """
    lo_x, hi_x = _as_interval(x, precision_bits + 4)
    if lo_x <= 0:
        raise DomainError("log of a nonpositive number")
    lo, _ = _log_rational(lo_x, precision_bits + 1)
    if hi_x == lo_x:
        _, hi = _log_rational(hi_x, precision_bits + 1)
    else:
        _, hi = _log_rational(hi_x, precision_bits + 1)
    return CertifiedReal(lo, hi, precision_bits)


def _exp_rational(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if q == 0:
        return Fraction(1), Fraction(1)
    ax = abs(q)
    target = Fraction(1, 1 << bits)
    mag = math.ceil(float(ax) * 1.4427) + 2
    P = bits + mag + 48
    while True:
        L, H = _exp_fixed_nonneg(ax, P)
        if q > 0:
            lo, hi = Fraction(L, 1 << P), Fraction(H, 1 << P)
        else:
            lo, hi = Fraction(1 << P, H), Fraction(1 << P, L)
        if hi - lo < target:
            return lo, hi
        P += 32 + P // 2


def certified_exp(x, precision_bits: int = 64) -> CertifiedReal:
    """Enclosure of exp(x) of width < 2**-precision_bits (for exact x)."""
    lo_x, hi_x = _as_interval(x, precision_bits + 8)
    lo, _ = _exp_rational(lo_x, precision_bits + 1)
    if hi_x == lo_x:
        _, hi = _exp_rational(hi_x, precision_bits + 1)
    else:
        _, hi = _exp_rational(hi_x, precision_bits + 1)
    return CertifiedReal(lo, hi, precision_bits)


def certified_e(precision_bits: int = 64) -> CertifiedReal:
    return certified_exp(Fraction(1), precision_bits)


# ---------------------------------------------------------------------------
# thresholds with transcendental parts

@dataclass(frozen=True)
class ExpThreshold:
    """The real number base + sign * exp(-R) with rational base, integer R."""

    base: Fraction
    sign: int
    R: int

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        e = certified_exp(Fraction(-self.R), bits + 2)
        if self.sign >= 0:
            return self.base + e.lo, self.base + e.hi
        return self.base - e.hi, self.base - e.lo

    def __float__(self):
        return float(self.base) + self.sign * math.exp(-self.R)

    def __str__(self):
        return f"{self.base}{'+' if self.sign >= 0 else '-'}e^-{self.R}"


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticSurd))


def _enclose(x, bits):
    if isinstance(x, (int, Fraction)):
        q = as_fraction(x)
        return q, q
    return x.enclosure(bits)


def _refine_compare(x, y) -> Ordering:
    bits = 64
    while bits <= MAX_REFINE_BITS:
        xl, xh = _enclose(x, bits)
        yl, yh = _enclose(y, bits)
        if xh < yl:
            return Ordering.LT
        if xl > yh:
            return Ordering.GT
        if xl == xh == yl == yh:
            return Ordering.EQ
        bits *= 2
    raise PrecisionExhausted(f"could not separate {x} and {y} with {MAX_REFINE_BITS} bits")


def compare(x, y) -> Ordering:
    """Ordering of two reals given as rationals, surds or thresholds.

    Exact operands are compared exactly; anything involving a transcendental
    threshold is resolved by refining enclosures until they separate.
    """
    if _is_exact(x) and _is_exact(y):
        if isinstance(x, QuadraticSurd) or isinstance(y, QuadraticSurd):
            return surd_compare(x, y)
        fx, fy = as_fraction(x), as_fraction(y)
        return Ordering((fx > fy) - (fx < fy))
    if isinstance(x, CertifiedReal) or isinstance(y, CertifiedReal):
        xl, xh = _enclose(x, 128)
        yl, yh = _enclose(y, 128)
        if xh < yl:
            return Ordering.LT
        if xl > yh:
            return Ordering.GT
        raise PrecisionExhausted("certified enclosures overlap")
    return _refine_compare(x, y)


# ---------------------------------------------------------------------------
# Lambert W

def _mpf_to_fraction(v) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    if man == 0:
        return Fraction(0)
    value = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -value if sign else value


def _halley_w(x, prec: int):
    """Principal-branch W(x) by Halley iteration in mpmath at ``prec`` bits."""
    with mpmath.workprec(prec + 16):
        if isinstance(x, Fraction):
            x = mpmath.mpf(x.numerator) / x.denominator
        else:
            x = mpmath.mpf(x)
        if x == 0:
            return mpmath.mpf(0)
        e = mpmath.e
        if x > e:
            l1 = mpmath.log(x)
            l2 = mpmath.log(l1)
            w = l1 - l2 + l2 / l1
        elif x < 0:
            p = mpmath.sqrt(max(mpmath.mpf(0), 2 * (e * x + 1)))
            w = -1 + p - p * p / 3 + 11 * p ** 3 / 72
        else:
            w = mpmath.log1p(x)
        tol = mpmath.mpf(2) ** (-prec)
        for _ in range(200):
            ew = mpmath.exp(w)
            f = w * ew - x
            wp1 = w + 1
            if wp1 == 0:
                break
            denom = ew * wp1 - (w + 2) * f / (2 * wp1)
            if denom == 0:
                break
            step = f / denom
            w -= step
            if abs(step) <= tol * (1 + abs(w)):
                break
        return w


def _wexpw(w: Fraction, bits: int) -> CertifiedReal:
    return certified_exp(w, bits) * CertifiedReal.exact(w)


def lambert_w(x, precision_bits: int = 64) -> CertifiedReal:
    """Principal branch of Lambert W as a certified enclosure.

    The point estimate comes from Halley iteration seeded with
    log x - log log x for x > e; the enclosure is then certified by checking
    w*exp(w) on both sides with certified exponentials, using that
    w -> w*exp(w) is increasing on [-1, inf).
    """
    bits = precision_bits
    xl, xh = _as_interval(x, bits + 8)
    inv_e = certified_exp(Fraction(-1), bits + 16)
    if xh < -inv_e.hi:
        raise DomainError("lambert_w undefined below -1/e")
    if xl == xh == 0:
        return CertifiedReal(Fraction(0), Fraction(0), bits)
    work = bits + 24

    def lower_root(v: Fraction) -> Fraction:
        if v <= -inv_e.lo:
            return Fraction(-1)
        w = _mpf_to_fraction(_halley_w(v, work))
        delta = Fraction(1, 1 << (bits + 6)) * max(1, abs(w))
        for _ in range(200):
            cand = w - delta
            if cand <= -1:
                return Fraction(-1)
            if _wexpw(cand, work).hi <= v:
                return cand
            delta *= 2
        raise PrecisionExhausted("lambert_w lower bound")

    def upper_root(v: Fraction) -> Fraction:
        w = _mpf_to_fraction(_halley_w(v, work))
        delta = Fraction(1, 1 << (bits + 6)) * max(1, abs(w))
        for _ in range(200):
            cand = max(w + delta, Fraction(-1) + delta)
            if _wexpw(cand, work).lo >= v:
                return cand
            delta *= 2
        raise PrecisionExhausted("lambert_w upper bound")

    lo = lower_root(xl)
    hi = upper_root(xh)
    return CertifiedReal(lo, hi, bits).rounded(bits + 8)
