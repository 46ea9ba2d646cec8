"""Words over {1, 2}, cuts, and exact values of lambda.

Cut convention: cut ``k`` of a word sits before digit ``k``.  The right tail
is read from digit ``k`` onward and the left tail from digit ``k - 1``
backward, and

    lambda = [right_0; right_1, ...] + [0; left_0, left_1, ...].

For a finite section the unknown continuations are replaced by the periodic
tails ``12...`` or ``21...`` that make each side extremal.  The value
``[c_0; c_1, ...]`` increases with ``c_i`` for even ``i`` and decreases for odd
``i``, which fixes which tail attains the maximum or minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .cfcore import mobius, periodic_value, size_r, size_s
from .errors import ConfigMismatch, DegenerateCut, EmptyWord
from .exactnum import QuadraticSurd

__all__ = [
    "Section",
    "TailPattern",
    "Violation",
    "transpose",
    "runs",
    "tail_pattern",
    "lambda_bounds",
    "lambda_minus",
    "lambda_at_cut",
    "markov_value_periodic",
    "forbidden_patterns",
    "sandwich_check",
    "sandwich_value",
    "disagreement_bounds",
    "sandwich_parts",
]


def transpose(w):
    """The word read backwards."""
    if isinstance(w, str):
        return w[::-1]
    return tuple(reversed(w))


def runs(w: str) -> list[tuple[int, int]]:
    if not w:
        raise EmptyWord("runs of the empty word")
    out = []
    cur, n = w[0], 0
    for ch in w:
        if ch == cur:
            n += 1
        else:
            out.append((int(cur), n))
            cur, n = ch, 1
    out.append((int(cur), n))
    return out


@dataclass(frozen=True)
class Section:
    word: str
    cut: int

    def __post_init__(self):
        if not 0 <= self.cut <= len(self.word):
            raise ValueError("cut outside the word")

    @property
    def right(self) -> str:
        return self.word[self.cut :]

    @property
    def left(self) -> str:
        """Left part read outward from the cut."""
        return self.word[: self.cut][::-1]

    def __str__(self):
        return f"{self.word[:self.cut]}|{self.word[self.cut:]}"

    @classmethod
    def parse(cls, text: str) -> "Section":
        if text.count("|") != 1:
            raise ValueError("a section needs exactly one '|'")
        left, right = text.split("|")
        return cls(left + right, len(left))


@dataclass(frozen=True)
class TailPattern:
    side: str  # "left" or "right"
    block: str  # "12" or "21"


def tail_pattern(side: str, known: int, extreme: str) -> TailPattern:
    """Periodic tail that makes one side of a cut extremal.

    ``known`` is the number of digits already fixed on that side and
    ``extreme`` is ``"max"`` or ``"min"``.  On the right the first tail digit
    has index ``known`` in ``[r_0; r_1, ...]``; on the left it has index
    ``known + 1`` in ``[0; l_0, ...]``.
    """
    index = known if side == "right" else known + 1
    increasing = index % 2 == 0
    want_two = increasing == (extreme == "max")
    return TailPattern(side, "21" if want_two else "12")


@lru_cache(maxsize=4)
def _tail_fixed_point(block: str) -> QuadraticSurd:
    return periodic_value(int(block[0]), block[1:], block)


def _with_tail(known: str, block: str) -> QuadraticSurd:
    """[known_0; known_1, ..., block, block, ...] for nonempty ``known``."""
    A, B, C, D = mobius(known)
    y = _tail_fixed_point(block)
    return (y * A + B) / (y * C + D)


def _section_value(right: str, left: str, rblock: str, lblock: str) -> QuadraticSurd:
    return _with_tail(right, rblock) + _with_tail(left, lblock).reciprocal()


def lambda_bounds(s: Section) -> tuple[QuadraticSurd, QuadraticSurd]:
    """(lambda-minus, lambda-plus) of a finite section, exactly."""
    right, left = s.right, s.left
    if not right or not left:
        raise DegenerateCut(f"section {s} has an empty side")
    lo = _section_value(
        right,
        left,
        tail_pattern("right", len(right), "min").block,
        tail_pattern("left", len(left), "min").block,
    )
    hi = _section_value(
        right,
        left,
        tail_pattern("right", len(right), "max").block,
        tail_pattern("left", len(left), "max").block,
    )
    return lo, hi


def lambda_minus(word: str, cut: int) -> QuadraticSurd:
    right, left = word[cut:], word[:cut][::-1]
    if not right or not left:
        raise DegenerateCut("empty side")
    return _section_value(
        right,
        left,
        "12" if len(right) % 2 == 0 else "21",
        "21" if len(left) % 2 == 0 else "12",
    )


def _rotate(period: str, position: int) -> str:
    return period[position:] + period[:position]


def lambda_at_cut(period: str, position: int) -> QuadraticSurd:
    """Exact lambda at a cut of the bi-infinite periodic word period^Z."""
    if not period:
        raise EmptyWord("empty period")
    if not 0 <= position < len(period):
        raise ValueError("cut position outside the period")
    right = _rotate(period, position)
    left = right[::-1]
    return periodic_value(int(right[0]), right[1:], right) + periodic_value(int(left[0]), left[1:], left).reciprocal()


def markov_value_periodic(period: str) -> tuple[QuadraticSurd, int]:
    """Markov value of period^Z and the first cut attaining it."""
    best, arg = None, 0
    for k in range(len(period)):
        v = lambda_at_cut(period, k)
        if best is None or v > best:
            best, arg = v, k
    return best, arg


class Violation(NamedTuple):
    kind: str  # "121", "212" or "odd_block"
    index: int
    length: int


def forbidden_patterns(w: str, r: int) -> list[Violation]:
    """Occurrences of 121, 212 and of odd inner blocks c' c^n c' with small c^n.

    Blocks with n = 1 are exactly the 121/212 occurrences and are reported
    once, under that pattern.
    """
    out = []
    for i in range(len(w) - 2):
        tri = w[i : i + 3]
        if tri in ("121", "212"):
            out.append(Violation(tri, i, 3))
    if len(w) >= 3:
        pos = 0
        rr = runs(w)
        for idx, (digit, n) in enumerate(rr):
            if 0 < idx < len(rr) - 1 and n % 2 == 1 and n >= 3:
                if size_r(str(digit) * n) <= r - 4:
                    out.append(Violation("odd_block", pos, n))
            pos += n
    out.sort(key=lambda v: (v.index, v.kind))
    return out


def _sign_from_heads(w: str, r1: str, s1: str) -> int:
    # [w, S] - [w, R]: the first difference sits at index |w|
    increasing = len(w) % 2 == 0
    return 1 if (s1 > r1) == increasing else -1


def sandwich_check(w: str, R_head: str, S_head: str) -> tuple[Fraction, Fraction, int]:
    """Bounds s(bwb) and s(bw1) and the sign of lambda - 3.

    Configuration: R* w* 11 | 22 w S with the heads of R and S differing in
    their first digit.
    """
    if not R_head or not S_head or R_head[0] == S_head[0]:
        raise ConfigMismatch("R and S must start with different digits")
    finite = R_head[::-1] + w[::-1] + "11" + "22" + w + S_head
    if "121" in finite or "212" in finite:
        raise ConfigMismatch("configuration contains 121 or 212")
    return size_s("11" + w + "11"), size_s("11" + w + "1"), _sign_from_heads(w, R_head[0], S_head[0])


def sandwich_parts(
    w: str, R_head: str, R_period: str, S_head: str, S_period: str
) -> tuple[QuadraticSurd, QuadraticSurd]:
    """The right value [2; 2, w, S] and the left term [0; 1, 1, w, R] separately.

    With different periods on the two sides these live in different
    quadratic fields, so they are only summed by ``sandwich_value`` when
    the fields agree.
    """
    right = "22" + w + S_head
    left = "11" + w + R_head
    return periodic_value(2, right[1:], S_period), periodic_value(1, left[1:], R_period).reciprocal()


def sandwich_value(w: str, R_head: str, R_period: str, S_head: str, S_period: str) -> QuadraticSurd:
    """Exact lambda at the cut of R* w* 11 | 22 w S with periodic R, S.

    Raises FieldMismatch when the two sides span different fields.
    """
    a, b = sandwich_parts(w, R_head, R_period, S_head, S_period)
    return a + b


def disagreement_bounds(ell: int) -> tuple[QuadraticSurd, QuadraticSurd]:
    """(1/7)(3-2 sqrt 2)^ell and (1/7)((3-sqrt 5)/2)^ell."""
    lo = QuadraticSurd(3, -2, 1, 2)
    hi = QuadraticSurd(3, -1, 2, 5)
    plo = QuadraticSurd(1)
    phi_ = QuadraticSurd(1)
    for _ in range(ell):
        plo = plo * lo
        phi_ = phi_ * hi
    return plo / 7, phi_ / 7
