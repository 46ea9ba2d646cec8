"""Gauss-Cantor sets K(B) and bounds for their Hausdorff dimension.

K(B) is the set of continued fractions [0; g_1, g_2, ...] with every g_i a
block of B.  On the cylinder of block b the expanding map is the |b|-th
iterate of the Gauss map; writing x = [0; b, z] with z in K(B),

    |psi'(x)| = (q_r + z q_{r-1})^2,

monotone in z, so its extremes on the hull [min K, max K] come from the
extreme points of K(B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cfcore import convergents, digits, periodic_value, size_r
from .errors import DomainError, NonPrimitive, NoRoot
from .exactnum import CertifiedReal, QuadraticSurd, certified_exp, certified_log, lambert_w

__all__ = [
    "GaussAlphabet",
    "ExpansionBounds",
    "DimensionBracket",
    "hull",
    "expansion_bounds",
    "dimension_bracket",
    "square_alphabet",
    "lower_bound_alphabet",
    "d_tilde",
    "d_tilde_equation",
    "c0",
    "asymptotic_d",
    "asymptotic_d_from_log",
]

DEFAULT_TOL = Fraction(1, 10**12)
PHI = QuadraticSurd(1, 1, 2, 5)


@dataclass(frozen=True)
class GaussAlphabet:
    blocks: tuple

    def __init__(self, blocks: Iterable):
        bl = tuple(b if isinstance(b, str) else "".join(map(str, b)) for b in blocks)
        object.__setattr__(self, "blocks", bl)
        if len(bl) < 2:
            raise NonPrimitive("an alphabet needs at least two blocks")
        for b in bl:
            if not b:
                raise NonPrimitive("empty block")
            digits(b)
        for i, x in enumerate(bl):
            for j, y in enumerate(bl):
                if i != j and x.startswith(y):
                    raise NonPrimitive(f"block {y!r} is a prefix of {x!r}")

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


def square_alphabet(B: GaussAlphabet) -> GaussAlphabet:
    """All two-block concatenations; K(B^2) = K(B)."""
    return GaussAlphabet([x + y for x in B for y in B])


def _branch(block: str, z):
    """[0; block, tail] where z = [0; tail]."""
    c = convergents(block)
    return (c.p_n + z * c.p_prev) / (c.q_n + z * c.q_prev)


def hull(B: GaussAlphabet) -> tuple[QuadraticSurd, QuadraticSurd]:
    """(min K(B), max K(B)) as exact surds.

    z -> [0; b, z] preserves order for even |b| and reverses it for odd |b|,
    so max K = max over b of [0; b, max K] or [0; b, min K], and similarly for
    min.  A float iteration picks the optimal blocks; the fixed point is then
    built exactly and checked to map the hull into itself.
    """
    lo, hi = 0.0, 1.0
    for _ in range(500):
        new_hi = max(_branch(b, hi if len(b) % 2 == 0 else lo) for b in B)
        new_lo = min(_branch(b, lo if len(b) % 2 == 0 else hi) for b in B)
        done = abs(new_hi - hi) < 1e-16 and abs(new_lo - lo) < 1e-16
        lo, hi = new_lo, new_hi
        if done:
            break
    near_hi = [b for b in B if _branch(b, hi if len(b) % 2 == 0 else lo) >= hi - 1e-12]
    near_lo = [b for b in B if _branch(b, lo if len(b) % 2 == 0 else hi) <= lo + 1e-12]
    for bh in near_hi:
        for bl in near_lo:
            bottom, top = _strategy_values(bh, bl)
            if _is_invariant(B, bottom, top):
                return bottom, top
    raise AssertionError("could not certify the hull of K(B)")


def _periodic(block: str) -> QuadraticSurd:
    ds = digits(block)
    return periodic_value(0, ds, ds)


def _strategy_values(bh: str, bl: str) -> tuple[QuadraticSurd, QuadraticSurd]:
    """(min, max) when max K = [0; bh, ...] and min K = [0; bl, ...]."""
    odd_h, odd_l = len(bh) % 2, len(bl) % 2
    if not odd_h and not odd_l:
        return _periodic(bl), _periodic(bh)
    if odd_h and odd_l:
        return _periodic(bl + bh), _periodic(bh + bl)
    if odd_h:
        bottom = _periodic(bl)
        return bottom, _branch(bh, bottom)
    top = _periodic(bh)
    return _branch(bl, top), top


def _is_invariant(B, bottom, top) -> bool:
    # no block maps [bottom, top] outside itself
    for b in B:
        even = len(b) % 2 == 0
        if _branch(b, top if even else bottom) > top or _branch(b, bottom if even else top) < bottom:
            return False
    return True


@dataclass(frozen=True)
class ExpansionBounds:
    blocks: tuple
    lam: tuple  # inf |psi'| per block, rational
    Lam: tuple  # sup |psi'| per block, rational

    def to_json(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "lambda": [str(x) for x in self.lam],
            "Lambda": [str(x) for x in self.Lam],
        }


def expansion_bounds(B: GaussAlphabet, bits: int = 128) -> ExpansionBounds:
    """Rational inf and sup of |psi'| on each cylinder, rounded outward."""
    if not isinstance(B, GaussAlphabet):
        B = GaussAlphabet(B)
    zmin, zmax = hull(B)
    zlo, _ = zmin.enclosure(bits)
    _, zhi = zmax.enclosure(bits)
    lam, Lam = [], []
    for b in B:
        c = convergents(b)
        lam.append((c.q_n + zlo * c.q_prev) ** 2)
        Lam.append((c.q_n + zhi * c.q_prev) ** 2)
    return ExpansionBounds(B.blocks, tuple(lam), tuple(Lam))


# ---------------------------------------------------------------------------
# pressure equations

def _pow_neg(L: Fraction, x: Fraction, bits: int) -> CertifiedReal:
    """L^{-x} for rational L > 1 and x >= 0."""
    lg = certified_log(L, bits)
    lo = certified_exp(-x * lg.hi, bits).lo
    hi = certified_exp(-x * lg.lo, bits).hi
    return CertifiedReal(lo, hi, bits)


def _pressure(values: Sequence[Fraction], x: Fraction, bits: int) -> CertifiedReal:
    total = CertifiedReal.exact(0)
    for L in values:
        total = total + _pow_neg(L, x, bits)
    return total.rounded(bits + 4)


def _bisect_decreasing(f, lo: Fraction, hi: Fraction, tol: Fraction, bits: int) -> CertifiedReal:
    """Root of f(x) = 1 for a decreasing f whose values are enclosures."""
    while hi - lo > tol:
        mid = (lo + hi) / 2
        b = bits
        while True:
            v = f(mid, b)
            if v.lo > 1:
                lo = mid
                break
            if v.hi < 1:
                hi = mid
                break
            if b > 8 * bits:
                # cannot separate: mid is within the enclosure width of the root
                return CertifiedReal(lo, hi, bits)
            b *= 2
    return CertifiedReal(lo, hi, bits)


@dataclass(frozen=True)
class DimensionBracket:
    beta_lower: CertifiedReal  # encloses the root of sum Lambda_j^{-x} = 1
    alpha_upper: CertifiedReal  # encloses the root of sum lambda_j^{-x} = 1
    residual_alpha: float = 0.0
    residual_beta: float = 0.0

    @property
    def lo(self) -> Fraction:
        return self.beta_lower.lo

    @property
    def hi(self) -> Fraction:
        return self.alpha_upper.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def nested_in(self, other: "DimensionBracket") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def to_json(self) -> dict:
        return {
            "beta_lower": self.beta_lower.to_json(),
            "alpha_upper": self.alpha_upper.to_json(),
            "residual_alpha": self.residual_alpha,
            "residual_beta": self.residual_beta,
        }


def _solve_pressure(values, tol: Fraction, bits: int) -> tuple[CertifiedReal, float]:
    """Root of P(x) = 1, narrowed until |P - 1| <= tol at both endpoints."""
    f = lambda x, b: _pressure(values, x, b)
    top = Fraction(1)
    while f(top, bits).hi >= 1:
        top *= 2
        if top > 1 << 20:
            raise NoRoot("pressure equation has no root")
    width = tol
    for _ in range(8):
        root = _bisect_decreasing(f, Fraction(0), top, width, bits)
        res = max(abs(float(f(root.lo, bits).mid) - 1), abs(float(f(root.hi, bits).mid) - 1))
        if res <= tol:
            break
        # |P'| scales with the alphabet size; shrink the interval to match
        width /= 64
        bits += 6
    return root, res


def dimension_bracket(B: GaussAlphabet, tol=DEFAULT_TOL) -> DimensionBracket:
    """Palis-Takens bracket: beta <= dim K(B) <= alpha.

    The upper end is capped at 1, which bounds every subset of the line.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tol must be positive")
    bits = max(64, 2 * math.ceil(-math.log2(float(tol))) + 16)
    eb = expansion_bounds(B)
    alpha, ra = _solve_pressure(eb.lam, tol, bits)
    beta, rb = _solve_pressure(eb.Lam, tol, bits)
    if alpha.lo > 1:
        alpha = CertifiedReal(Fraction(1), Fraction(1), bits)
    elif alpha.hi > 1:
        alpha = CertifiedReal(alpha.lo, Fraction(1), bits)
    return DimensionBracket(beta, alpha, ra, rb)


# ---------------------------------------------------------------------------
# the lower-bound alphabet and its dimension proxy

def lower_bound_alphabet(r: int) -> GaussAlphabet:
    """{1^k} together with 1^{k+1-j} 22 1^s for 2 <= j <= k+1, k = 2r."""
    if r < 2:
        raise DomainError("r must be at least 2")
    k = 2 * r
    s = 1
    while size_r("1" * s) < r:
        s += 1
    blocks = ["1" * k] + ["1" * (k + 1 - j) + "22" + "1" * s for j in range(2, k + 2)]
    return GaussAlphabet(blocks)


_LOG_PHI_CACHE: dict = {}


def _log_phi(bits: int) -> CertifiedReal:
    if bits not in _LOG_PHI_CACHE:
        _LOG_PHI_CACHE[bits] = certified_log(PHI, bits)
    return _LOG_PHI_CACHE[bits]


def _exp_interval(lo: Fraction, hi: Fraction, bits: int) -> CertifiedReal:
    return CertifiedReal(certified_exp(lo, bits).lo, certified_exp(hi, bits).hi, bits)


def d_tilde_equation(r: int, d: Fraction, bits: int = 80) -> CertifiedReal:
    """(4 phi^{4r})^{-d} + sum_{t<2r} phi^{-2td} e^{-(r+8)d}, enclosed.

    The sum is the geometric series (1 - rho^{2r}) / (1 - rho), rho = phi^{-2d}.
    """
    d = Fraction(d)
    if d <= 0:
        raise DomainError("d must be positive")
    k = 2 * r
    lp = _log_phi(bits)
    l4 = certified_log(Fraction(4), bits)
    first = _exp_interval(-d * (l4.hi + 4 * r * lp.hi), -d * (l4.lo + 4 * r * lp.lo), bits)
    rho = _exp_interval(-2 * d * lp.hi, -2 * d * lp.lo, bits)
    rho_k = _exp_interval(-2 * k * d * lp.hi, -2 * k * d * lp.lo, bits)
    num = CertifiedReal(1 - rho_k.hi, 1 - rho_k.lo, bits)
    den = CertifiedReal(1 - rho.hi, 1 - rho.lo, bits)
    tail = certified_exp(Fraction(-(r + 8)) * d, bits)
    return (first + (num / den) * tail).rounded(bits + 8)


def d_tilde(r: int, tol=DEFAULT_TOL) -> CertifiedReal:
    """Root in (0, 1) of d_tilde_equation(r, d) = 1."""
    if r < 2:
        raise DomainError("r must be at least 2")
    tol = Fraction(tol)
    bits = max(64, 2 * math.ceil(-math.log2(float(tol))) + 16)
    lo, hi = Fraction(1, 10**12), Fraction(1)
    f = lambda x, b: d_tilde_equation(r, x, b)
    if not (f(lo, bits).lo > 1 and f(hi, bits).hi < 1):
        raise NoRoot(f"no sign change on [1e-12, 1] for r={r}")
    return _bisect_decreasing(f, lo, hi, tol, bits)


def c0(bits: int = 96) -> CertifiedReal:
    """-log log((3 + sqrt 5) / 2)."""
    inner = certified_log(QuadraticSurd(3, 1, 2, 5), bits + 16)
    return -certified_log(inner, bits)


def asymptotic_d_from_log(L, bits: int = 80) -> tuple[CertifiedReal, CertifiedReal]:
    """(g1, g2) for |log eps| = L > 1."""
    Lc = L if isinstance(L, CertifiedReal) else CertifiedReal.exact(Fraction(L))
    if Lc.lo <= 1:
        raise DomainError("need eps < 1/e")
    c = c0(bits + 16)
    ec = CertifiedReal(certified_exp(c.lo, bits + 16).lo, certified_exp(c.hi, bits + 16).hi, bits)
    w = lambert_w(ec * Lc, bits)
    g1 = w * 2 / Lc
    g2 = certified_log(Lc, bits) * 2 / Lc
    return g1.rounded(bits), g2.rounded(bits)


def asymptotic_d(eps, bits: int = 80) -> tuple[CertifiedReal, CertifiedReal]:
    """g1 = 2 W(e^{c0} |log eps|) / |log eps| and g2 = 2 log|log eps| / |log eps|."""
    e = eps if isinstance(eps, CertifiedReal) else CertifiedReal.exact(Fraction(eps))
    inv_e = certified_exp(Fraction(-1), bits)
    if e.lo <= 0 or e.hi >= inv_e.lo:
        raise DomainError("eps must lie in (0, 1/e)")
    L = -certified_log(e, bits)
    return asymptotic_d_from_log(CertifiedReal(L.lo, L.hi, bits), bits)
