"""Certified membership in Sigma(t, n), covering counts, and the gap check.

A word ``w`` is in Sigma(t, n) when some bi-infinite word with Markov
value at most ``t`` contains it.  :func:`membership` proves this with a
periodic witness, or disproves it by extending ``w`` on both sides until
every extension has some cut whose smallest possible lambda exceeds ``t``.
Anything in between is reported as unknown.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .cfcore import mobius, periodic_value, size_r
from .christoffel import iter_pairs, sigma3_enumerate, to_digits
from .errors import ConfigError, DomainError, ResourceLimit
from .exactnum import (
    CertifiedReal,
    ExpThreshold,
    QuadraticSurd,
    certified_exp,
    certified_log,
    compare,
    lambert_w,
)
from .words import markov_value_periodic

__all__ = [
    "IN",
    "OUT",
    "UNKNOWN",
    "MembershipVerdict",
    "SigmaSet",
    "CoveringReport",
    "GapSpec",
    "node_budget",
    "membership",
    "enumerate_sigma",
    "verify_theorem_equalities",
    "q_r_words",
    "covering_estimate",
    "comb_bound",
    "comb_brute",
    "epsilon_m",
    "gap_endpoints",
    "gap_cut_value",
    "gap_asymptotic",
    "gap_emptiness",
]

Bound = Union[int, Fraction, QuadraticSurd, ExpThreshold]

IN = "CertifiedIn"
OUT = "CertifiedOut"
UNKNOWN = "Unknown"

DEFAULT_NODE_BUDGET = 2_000_000
# digits kept on each side of a cut when bounding lambda; dropping digits
# only widens [lambda-, lambda+], so the truncation is conservative
CUT_WINDOW = 64
FLOAT_MARGIN = 1e-9


# set by the CLI for the lifetime of one invocation when the environment is silent
_budget_override: Optional[int] = None


def node_budget(default: int = DEFAULT_NODE_BUDGET) -> int:
    env = os.environ.get("SPECTRA_NODE_BUDGET")
    if env:
        return int(env)
    return _budget_override if _budget_override is not None else default


@dataclass(frozen=True)
class MembershipVerdict:
    word: str
    status: str
    witness: Optional[str] = None  # period for CertifiedIn
    depth: Optional[int] = None  # refutation depth for CertifiedOut
    cut: Optional[int] = None  # failing cut when refuted at depth 0
    leaves: tuple = ()  # (extension, cut) pairs proving CertifiedOut

    def to_json(self) -> dict:
        out = {"word": self.word, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.depth is not None:
            out["depth"] = self.depth
        if self.cut is not None:
            out["cut"] = self.cut
        return out


# ---------------------------------------------------------------------------
# lambda bounds at the cuts of a finite word

_Y12 = (1 + math.sqrt(3)) / 2  # [1; 2, 1, 2, ...]
_Y21 = 1 + math.sqrt(3)  # [2; 1, 2, 1, ...]


def _float_tail(ds: str, y: float) -> float:
    x = y
    for ch in reversed(ds):
        x = (ord(ch) - 48) + 1.0 / x
    return x


def _float_bounds(right: str, left: str) -> tuple[float, float]:
    even_r = len(right) % 2 == 0
    even_l = len(left) % 2 == 0
    lo = _float_tail(right, _Y12 if even_r else _Y21) + 1.0 / _float_tail(left, _Y21 if even_l else _Y12)
    hi = _float_tail(right, _Y21 if even_r else _Y12) + 1.0 / _float_tail(left, _Y12 if even_l else _Y21)
    return lo, hi


@lru_cache(maxsize=4)
def _tail_surd(block: str) -> QuadraticSurd:
    return periodic_value(int(block[0]), block[1:], block)


def _exact_side(ds: str, block: str) -> QuadraticSurd:
    A, B, C, D = mobius(ds)
    y = _tail_surd(block)
    return (y * A + B) / (y * C + D)


def _exact_minus(right: str, left: str) -> QuadraticSurd:
    return _exact_side(right, "12" if len(right) % 2 == 0 else "21") + _exact_side(
        left, "21" if len(left) % 2 == 0 else "12"
    ).reciprocal()


def _exact_plus(right: str, left: str) -> QuadraticSurd:
    return _exact_side(right, "21" if len(right) % 2 == 0 else "12") + _exact_side(
        left, "12" if len(left) % 2 == 0 else "21"
    ).reciprocal()


class _Threshold:
    """A bound t with a float shadow for fast, margin-guarded decisions."""

    def __init__(self, t: Bound):
        self.t = t
        self.f = float(t)

    def above(self, right: str, left: str) -> int:
        """+1 if lambda- > t, -1 if lambda+ <= t, 0 if undecided."""
        lo, hi = _float_bounds(right, left)
        if lo > self.f + FLOAT_MARGIN:
            return 1
        if hi < self.f - FLOAT_MARGIN:
            return -1
        if lo >= self.f - FLOAT_MARGIN and compare(_exact_minus(right, left), self.t) > 0:
            return 1
        if hi <= self.f + FLOAT_MARGIN and compare(_exact_plus(right, left), self.t) <= 0:
            return -1
        return 0


def _classify(x: str, cuts: Iterable[int], th: _Threshold):
    """('dead', cut) if some cut has lambda- > t, else ('alive', open cuts)."""
    keep = []
    for c in cuts:
        right = x[c : c + CUT_WINDOW]
        left = x[max(0, c - CUT_WINDOW) : c][::-1]
        s = th.above(right, left)
        if s > 0:
            return "dead", c
        if s == 0:
            keep.append(c)
    return "alive", keep


# ---------------------------------------------------------------------------
# witnesses

@lru_cache(maxsize=1 << 15)
def _period_value(period: str) -> QuadraticSurd:
    return markov_value_periodic(period)[0]


@lru_cache(maxsize=256)
def _witness_pool(n: int) -> tuple[str, ...]:
    """Candidate periods for words of length n, shortest first."""
    pool = {"1", "2"}
    for p in iter_pairs((max(3 * n, 5) - 1) // 2):
        pool.add(to_digits(p.word))
    for m in range(0, n + 3):
        pool.add("22" + "1" * m)
        for m2 in range(0, min(m, 6) + 1):
            pool.add("22" + "1" * m + "22" + "1" * m2)
    return tuple(sorted(pool, key=lambda s: (len(s), s)))


def _contains_cyclic(period: str, w: str) -> bool:
    return w in period * (len(w) // len(period) + 2)


def _find_witness(w: str, th: _Threshold) -> Optional[str]:
    for period in _witness_pool(len(w)):
        if _contains_cyclic(period, w):
            v = _period_value(period)
            if float(v) > th.f + FLOAT_MARGIN:
                continue
            if compare(v, th.t) <= 0:
                return period
    return None


# ---------------------------------------------------------------------------
# membership

MAX_STORED_LEAVES = 4096


def _refute(w: str, th: _Threshold, depth: int, budget: list):
    """Extension search.  Returns (verdict-or-None, leaves)."""
    status, info = _classify(w, range(1, len(w)), th)
    if status == "dead":
        return MembershipVerdict(w, OUT, depth=0, cut=info, leaves=((w, info),)), None
    frontier = [(w, info)]
    leaves = []
    for step in range(2 * depth):
        right_side = step % 2 == 0
        new = []
        for x, cuts in frontier:
            for dg in "12":
                if right_side:
                    y = x + dg
                    cand = cuts + [len(x)]
                else:
                    y = dg + x
                    cand = [1] + [c + 1 for c in cuts]
                status, info = _classify(y, cand, th)
                if status == "dead":
                    if len(leaves) < MAX_STORED_LEAVES:
                        leaves.append((y, info))
                else:
                    new.append((y, info))
        budget[0] -= len(new) + 1
        if budget[0] < 0:
            raise ResourceLimit(f"node budget exhausted while extending {w}")
        frontier = new
        if not frontier:
            return MembershipVerdict(w, OUT, depth=(step + 2) // 2, leaves=tuple(leaves)), None
    return None, frontier


def membership(w: str, t: Bound, depth: int, witnesses: bool = True, budget: Optional[int] = None) -> MembershipVerdict:
    """Three-valued verdict for w in Sigma(t, |w|)."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    th = t if isinstance(t, _Threshold) else _Threshold(t)
    if witnesses:
        period = _find_witness(w, th)
        if period is not None:
            return MembershipVerdict(w, IN, witness=period)
    box = [node_budget() if budget is None else budget]
    verdict, _ = _refute(w, th, depth, box)
    if verdict is not None:
        return verdict
    return MembershipVerdict(w, UNKNOWN)


# ---------------------------------------------------------------------------
# enumeration

@dataclass
class SigmaSet:
    t: Bound
    n: int
    certified: list
    unknown: list
    depth: int
    refuted: int = 0
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "t": _bound_json(self.t),
            "n": self.n,
            "depth": self.depth,
            "certified": self.certified,
            "unknown": self.unknown,
            "refuted": self.refuted,
        }


def _bound_json(t: Bound):
    if isinstance(t, QuadraticSurd):
        return {"surd": t.to_json()}
    if isinstance(t, ExpThreshold):
        return {"base": str(t.base), "sign": t.sign, "R": t.R}
    q = Fraction(t)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def enumerate_sigma(t: Bound, n: int, depth: int, pre_depth: int = 2, budget: Optional[int] = None) -> SigmaSet:
    """Partition the length-n words not refuted at ``depth`` into certified/unknown.

    Words are grown one digit at a time; a word is only tested when its
    prefix and suffix of length n - 1 both survived.  Shorter levels are
    tested at ``min(depth, pre_depth)``, which can only refute.
    """
    if n < 1:
        raise ValueError("n must be positive")
    th = _Threshold(t)
    box = [node_budget() if budget is None else budget]
    alive = {""}
    for k in range(1, n + 1):
        last = k == n
        d = depth if last else min(depth, pre_depth)
        nxt = {}
        for x in sorted(alive):
            for dg in "12":
                y = x + dg
                if k > 1 and y[1:] not in alive:
                    continue
                if last:
                    period = _find_witness(y, th)
                    if period is not None:
                        nxt[y] = MembershipVerdict(y, IN, witness=period)
                        continue
                try:
                    verdict, _ = _refute(y, th, d, box)
                except ResourceLimit as exc:
                    raise ResourceLimit(str(exc), partial={"level": k, "alive": sorted(alive)}) from None
                if verdict is None:
                    nxt[y] = MembershipVerdict(y, UNKNOWN)
        alive = set(nxt)
        if last:
            certified = sorted(y for y, v in nxt.items() if v.status == IN)
            unknown = sorted(y for y, v in nxt.items() if v.status == UNKNOWN)
            refuted = 2 ** n - len(nxt) if n <= 60 else -1
            wit = {y: v.witness for y, v in nxt.items() if v.status == IN}
            return SigmaSet(t, n, certified, unknown, depth, refuted, wit)
    raise AssertionError("unreachable")


def verify_theorem_equalities(n: int, B: int = 216, depth: int = 8) -> dict:
    """Compare Sigma(3 - B^-n, n), Sigma(3, n) and Sigma(3 + B^-n, n).

    Only reports; no claim is made for small n.
    """
    if n < 1 or B <= 1:
        raise ValueError("need n >= 1 and B > 1")
    delta = Fraction(1, B ** n)
    low = enumerate_sigma(3 - delta, n, depth)
    mid = enumerate_sigma(Fraction(3), n, depth)
    high = enumerate_sigma(3 + delta, n, depth)
    tree = set(sigma3_enumerate(n))
    L, M, H = set(low.certified), set(mid.certified), set(high.certified)
    witness_len = max((len(p) for p in low.witnesses.values()), default=0)
    return {
        "schema_version": 1,
        "n": n,
        "B": B,
        "depth": depth,
        "sizes": {"lower": len(L), "middle": len(M), "upper": len(H), "tree": len(tree)},
        "unknown": {"lower": low.unknown, "middle": mid.unknown, "upper": high.unknown},
        "lower_equals_middle": L == M and not low.unknown and not mid.unknown,
        "middle_equals_upper": M == H and not mid.unknown and not high.unknown,
        "middle_equals_tree": M == tree,
        "middle_subset_upper": M <= H | set(high.unknown),
        "lower_minus_middle": sorted(L - M),
        "middle_minus_lower": sorted(M - L),
        "upper_minus_middle": sorted(H - M),
        "lower_witness_max_length": witness_len,
        "lower_witnesses_within_3n": witness_len <= max(3 * n, 5),
    }


# ---------------------------------------------------------------------------
# Q_r covering words

def q_r_words(r: int, t: Bound, depth: int, budget: Optional[int] = None, classified: bool = False):
    """Words w with size_r(w) >= r > size_r(w minus its last digit), not refuted.

    Inner nodes are refuted at depth 0, which is sound for every extension;
    leaves are searched to ``depth``.  With ``classified`` the result maps
    each word to its verdict status (``Unknown`` or ``CertifiedIn``).
    """
    if r < 1:
        raise ValueError("r must be positive")
    th = _Threshold(t)
    box = [node_budget() if budget is None else budget]
    out = {}
    stack = ["1", "2"]
    while stack:
        x = stack.pop()
        box[0] -= 1
        if box[0] < 0:
            raise ResourceLimit("node budget exhausted in q_r_words", partial={"found": sorted(out)})
        if size_r(x) >= r:
            verdict, _ = _refute(x, th, depth, box)
            if verdict is None:
                out[x] = UNKNOWN
            continue
        status, _ = _classify(x, range(1, len(x)), th)
        if status == "dead":
            continue
        stack.append(x + "2")
        stack.append(x + "1")
    if classified:
        return dict(sorted(out.items()))
    return sorted(out)


@dataclass(frozen=True)
class CoveringReport:
    t: Bound
    r: int
    count: int
    estimate: CertifiedReal
    unknown: int

    def to_json(self) -> dict:
        return {
            "t": _bound_json(self.t),
            "r": self.r,
            "count": self.count,
            "unknown": self.unknown,
            "estimate": self.estimate.to_json(),
        }


def covering_estimate(t: Bound, r: int, depth: int, budget: Optional[int] = None) -> CoveringReport:
    """log(#Q_r words not refuted) / r, as a box-dimension proxy."""
    words = q_r_words(r, t, depth, budget=budget, classified=True)
    count = len(words)
    if count == 0:
        raise ResourceLimit("no covering words survived", partial={"r": r})
    est = certified_log(Fraction(count), 64) / Fraction(r)
    unknown = sum(1 for s in words.values() if s == UNKNOWN)
    return CoveringReport(t, r, count, est, unknown)


# ---------------------------------------------------------------------------
# the counting function

def _floor_budget(U: int, ell: int, m) -> int:
    return math.floor((U - ell) * Fraction(m))


def comb_brute(U: int, m) -> int:
    """Number of (ell, x_1..x_ell), x_i >= 1, with sum x_i <= (U - ell) m, 1 <= ell <= U.

    Counted by a table over (length, sum) rather than by closed form.
    """
    if U < 1 or Fraction(m) <= 0:
        raise DomainError("comb_brute needs U >= 1 and m > 0")
    total = 0
    for ell in range(1, U + 1):
        N = _floor_budget(U, ell, m)
        if N < ell:
            continue
        row = [1] + [0] * N  # compositions of each sum into the parts placed so far
        for _ in range(ell):
            nxt = [0] * (N + 1)
            acc = 0
            for s in range(N + 1):
                # nxt[s] = sum_{j >= 1} row[s - j]
                nxt[s] = acc
                acc += row[s]
            row = nxt
        total += sum(row)
    return total


def comb_bound(U: int, m, precision_bits: int = 64) -> CertifiedReal:
    """U e^{W(m)(U+1)} for U <= m, else U e^{U m / e^{W(m-1)}}."""
    mq = Fraction(m)
    if U < 1 or mq <= 0:
        raise DomainError("comb_bound needs U >= 1 and m > 0")
    if U <= mq:
        w = lambert_w(mq, precision_bits)
        expo = w * (U + 1)
    else:
        w = lambert_w(mq - 1, precision_bits)
        ew = CertifiedReal(certified_exp(w.lo, precision_bits).lo, certified_exp(w.hi, precision_bits).hi, precision_bits)
        expo = CertifiedReal.exact(U * mq) / ew
    e = CertifiedReal(certified_exp(expo.lo, precision_bits).lo, certified_exp(expo.hi, precision_bits).hi, precision_bits)
    return e * U


def epsilon_m(m, digits: int = 40):
    """Root in (0, 1) of log(e m eps / (1 - eps)) = 1 / eps, by bisection."""
    import mpmath

    with mpmath.workdps(digits + 10):
        mm = mpmath.mpf(Fraction(m).numerator) / Fraction(m).denominator

        def f(eps):
            return mpmath.log(mpmath.e * mm * eps / (1 - eps)) - 1 / eps

        lo, hi = mpmath.mpf("1e-30"), 1 - mpmath.mpf("1e-30")
        for _ in range(4 * digits):
            mid = (lo + hi) / 2
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


# ---------------------------------------------------------------------------
# the gap between consecutive families of values above 3

PHI = QuadraticSurd(1, 1, 2, 5)
X_COEFF = Fraction(1382, 1000)
Y_COEFF = Fraction(2236, 1000)


def _phi_pow(e: int) -> QuadraticSurd:
    if e < 0:
        return _phi_pow(-e).reciprocal()
    out = QuadraticSurd(1)
    base = PHI
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


@dataclass(frozen=True)
class GapSpec:
    k: int
    scale: QuadraticSurd  # 2(3 phi - 4) / (3 phi^{4k+4})
    x_k: QuadraticSurd
    y_k: QuadraticSurd

    def certified(self, bits: int = 96) -> tuple[CertifiedReal, CertifiedReal]:
        return self.x_k.certified(bits), self.y_k.certified(bits)

    def to_json(self) -> dict:
        x, y = self.certified()
        return {"k": self.k, "scale": self.scale.to_json(), "x_k": x.to_json(), "y_k": y.to_json()}


def _scale(k: int) -> QuadraticSurd:
    return (PHI * 3 - 4) * 2 / (_phi_pow(4 * k + 4) * 3)


def gap_endpoints(k: int) -> GapSpec:
    if k < 1:
        raise ConfigError("k must be at least 1")
    sc = _scale(k)
    return GapSpec(k, sc, sc * X_COEFF, sc * Y_COEFF)


def _gap_sides(k: int, j: int, case: str, s1: int, s2: int) -> tuple[str, str]:
    if k < 1 or j < 0 or s1 < 0 or s2 < 0:
        raise ConfigError("need k >= 1 and j, s1, s2 >= 0")
    if case == "TypeA":
        # 1^{s1} 22 1^{2k+1} | 22 1^{2k+j} 22 1^{s2}
        right = "22" + "1" * (2 * k + j) + "22" + "1" * s2
        left = "1" * (2 * k + 1) + "22" + "1" * s1
    elif case == "TypeB":
        # 1^{s1} 22 1^{2k} 22 | 1^{2k+3+j} 22 1^{s2}, evaluated with the
        # 22-side of the bar carrying the integer part
        right = "22" + "1" * (2 * k) + "22" + "1" * s1
        left = "1" * (2 * k + 3 + j) + "22" + "1" * s2
    else:
        raise ConfigError(f"unknown case {case!r}")
    return right, left


def gap_cut_value(k: int, j: int, case: str, s1: int = 60, s2: int = 60) -> QuadraticSurd:
    """Exact lambda - 3 at the marked cut, tails continued by 1 1 1 ..."""
    right, left = _gap_sides(k, j, case, s1, s2)
    lam = periodic_value(int(right[0]), right[1:], "1") + periodic_value(int(left[0]), left[1:], "1").reciprocal()
    return lam - 3


def gap_asymptotic(k: int, j: int, case: str) -> QuadraticSurd:
    """Leading-order value of gap_cut_value for large k."""
    C = (PHI * 3 - 4) * 2 / (_phi_pow(4) * 3)
    sgn = 1 if j % 2 == 0 else -1
    if case == "TypeA":
        return C * (_phi_pow(-4 * k) + _phi_pow(-4 * k - 2 - 2 * j) * sgn)
    if case == "TypeB":
        return C * (_phi_pow(-4 * k - 2) + _phi_pow(-4 * k - 4 - 2 * j) * sgn)
    raise ConfigError(f"unknown case {case!r}")


def gap_emptiness(k: int, j_max: int = 8, s_min: int = 60, neighbours: bool = False) -> dict:
    """Check that the cut values avoid [x_k, y_k] and report margins.

    The margin of a value is its distance to the interval, negative when it
    falls inside.  ``neighbours`` also scans the families at k - 1 and k + 1.
    """
    ends = gap_endpoints(k)
    ks = [k] if not neighbours else [kk for kk in (k - 1, k, k + 1) if kk >= 1]
    rows = []
    for kk in ks:
        for case in ("TypeA", "TypeB"):
            for j in range(j_max + 1):
                v = gap_cut_value(kk, j, case, s_min, s_min)
                if v < ends.x_k:
                    side, margin = "below", ends.x_k - v
                elif v > ends.y_k:
                    side, margin = "above", v - ends.y_k
                else:
                    side, margin = "inside", -min(v - ends.x_k, ends.y_k - v)
                rows.append(
                    {
                        "k": kk,
                        "case": case,
                        "j": j,
                        "value": v,
                        "scaled": float(v / ends.scale),
                        "side": side,
                        "margin": margin,
                    }
                )
    rel = []
    for j in range(j_max + 1):
        v = gap_cut_value(k, j, "TypeA", s_min, s_min)
        a = gap_asymptotic(k, j, "TypeA")
        rel.append(abs(float(v / a) - 1))
    return {
        "k": k,
        "j_max": j_max,
        "s_min": s_min,
        "asymptotic_regime": k >= 3,
        "all_outside": all(r["side"] != "inside" for r in rows),
        "min_margin": min(float(r["margin"] / ends.scale) for r in rows),
        "typeA_max_relative_error": max(rel),
        "rows": rows,
        "endpoints": ends,
    }
