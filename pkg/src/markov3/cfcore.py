"""Continued-fraction primitives over finite words.

A word is either a digit string such as ``"1221"`` or any sequence of
positive integers.  ``[0; w]`` is the finite continued fraction with partial
quotients ``w``; its denominator is the continuant ``K(w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .errors import EmptyPeriod, EmptyWord
from .exactnum import QuadraticSurd, certified_log

Word = Union[str, Sequence[int]]

__all__ = [
    "Word",
    "digits",
    "Continuants",
    "CfInterval",
    "continuant",
    "convergents",
    "interval_of",
    "size_s",
    "size_r",
    "floor_log",
    "periodic_value",
    "mobius",
]


def digits(w: Word) -> tuple[int, ...]:
    if isinstance(w, str):
        out = tuple(ord(ch) - 48 for ch in w)
        if any(d < 1 or d > 9 for d in out):
            raise ValueError(f"bad digit word {w!r}")
        return out
    out = tuple(int(c) for c in w)
    if any(c < 1 for c in out):
        raise ValueError("partial quotients must be positive")
    return out


@dataclass(frozen=True)
class Continuants:
    p_n: int
    q_n: int
    p_prev: int
    q_prev: int
    n: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p_n, self.q_n)


@dataclass(frozen=True)
class CfInterval:
    lo: Fraction
    hi: Fraction

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def to_json(self) -> dict:
        from .exactnum import rational_to_json

        return {"lo": rational_to_json(self.lo), "hi": rational_to_json(self.hi)}


def continuant(w: Word) -> int:
    """K(w), with K of the empty word equal to 1."""
    q_prev, q = 0, 1
    for c in digits(w):
        q_prev, q = q, c * q + q_prev
    return q


def convergents(w: Word) -> Continuants:
    ds = digits(w)
    if not ds:
        raise EmptyWord("convergents of the empty word")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for c in ds:
        p_prev, p = p, c * p + p_prev
        q_prev, q = q, c * q + q_prev
    return Continuants(p, q, p_prev, q_prev, len(ds))


def interval_of(w: Word) -> CfInterval:
    """Closure of the set of x in [0, 1] whose expansion starts with w."""
    c = convergents(w)
    x = Fraction(c.p_n, c.q_n)
    y = Fraction(c.p_n + c.p_prev, c.q_n + c.q_prev)
    return CfInterval(min(x, y), max(x, y))


def _inverse_size(w: Word) -> int:
    c = convergents(w)
    return c.q_n * (c.q_n + c.q_prev)


def size_s(w: Word) -> Fraction:
    return Fraction(1, _inverse_size(w))


@lru_cache(maxsize=1 << 16)
def floor_log(n: int) -> int:
    """floor(log n) for an integer n >= 1, certified.

    A double-precision estimate settles the floor unless it lands within
    1e-9 of an integer; then certified enclosures are refined until the
    floor is determined (log n is irrational for n > 1).
    """
    if n < 1:
        raise ValueError("floor_log needs n >= 1")
    if n == 1:
        return 0
    est = math.log(n)
    k = math.floor(est)
    if est - k > 1e-9 * max(1.0, est) and k + 1 - est > 1e-9 * max(1.0, est):
        return k
    bits = 64
    while True:
        enc = certified_log(Fraction(n), bits)
        lo, hi = math.floor(enc.lo), math.floor(enc.hi)
        if lo == hi:
            return lo
        bits *= 2


def size_r(w: Word) -> int:
    """floor(log(1/s(w)))."""
    return floor_log(_inverse_size(w))


def mobius(w: Word, head: int | None = None) -> tuple[int, int, int, int]:
    """Matrix (A, B, C, D) with [head; w, x] = (A x + B) / (C x + D).

    Without a head the map is x -> [w_0; w_1, ..., w_{n-1}, x].
    """
    A, B, C, D = 1, 0, 0, 1
    seq = digits(w)
    if head is not None:
        seq = (head,) + seq
    for c in seq:
        # multiply on the right by [[c, 1], [1, 0]]
        A, B, C, D = A * c + B, A, C * c + D, C
    return A, B, C, D


def _purely_periodic(period: Sequence[int]) -> QuadraticSurd:
    """The value y = [p_0; p_1, ..., p_{k-1}, y] > 1."""
    A, B, C, D = mobius(period)
    # C y^2 + (D - A) y - B = 0, with the positive root inside the cylinder
    disc = (A - D) ** 2 + 4 * B * C
    return QuadraticSurd(A - D, 1, 2 * C, disc)


def periodic_value(head: int, preperiod: Word, period: Word) -> QuadraticSurd:
    """Exact value of [head; preperiod, period, period, ...]."""
    per = digits(period)
    if not per:
        raise EmptyPeriod("periodic_value needs a nonempty period")
    y = _purely_periodic(per)
    A, B, C, D = mobius(preperiod, head=head)
    return (y * A + B) / (y * C + D)
