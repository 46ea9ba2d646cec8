"""Independent reference computations used only by the tests.

None of these import the package's numeric kernels: values come from
mpmath at high precision or from plain enumeration.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

import mpmath

DPS = 80


def euler_continuant(ds) -> int:
    """Sum over all ways to delete disjoint adjacent pairs of the remaining product."""
    ds = [int(c) for c in ds]

    @lru_cache(maxsize=None)
    def go(i):
        if i >= len(ds):
            return 1
        total = ds[i] * go(i + 1)
        if i + 1 < len(ds):
            total += go(i + 2)
        return total

    return go(0)


def fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def pell(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, 2 * b + a
    return a


def mp_cf(head: int, ds) -> mpmath.mpf:
    """[head; ds...] for a finite (long) digit list, evaluated backwards."""
    with mpmath.workdps(DPS):
        tail = None
        for c in reversed(list(ds)):
            tail = mpmath.mpf(int(c)) if tail is None else int(c) + 1 / tail
        if tail is None:
            return mpmath.mpf(head)
        return head + 1 / tail


def mp_periodic_tail(prefix: str, period: str, total: int = 400) -> list:
    out = list(prefix)
    while len(out) < total:
        out.extend(period)
    return out


def mp_lambda_periodic(period: str, cut: int) -> mpmath.mpf:
    """lambda at a cut of period^Z from long truncations."""
    rot = period[cut:] + period[:cut]
    right = mp_periodic_tail("", rot)
    left = mp_periodic_tail("", rot[::-1])
    with mpmath.workdps(DPS):
        return mp_cf(int(right[0]), right[1:]) + 1 / mp_cf(int(left[0]), left[1:])


def mp_markov_value(period: str) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return max(mp_lambda_periodic(period, k) for k in range(len(period)))


def mp_sided(right: str, right_tail: str, left: str, left_tail: str) -> mpmath.mpf:
    """[right; right_tail^inf] + [0; left, left_tail^inf]."""
    r = mp_periodic_tail(right, right_tail)
    l = mp_periodic_tail(left, left_tail)
    with mpmath.workdps(DPS):
        return mp_cf(int(r[0]), r[1:]) + 1 / mp_cf(int(l[0]), l[1:])


# ---------------------------------------------------------------------------
# the substitution tree, rebuilt from the definitions

_U = {"a": "ab", "b": "b"}
_V = {"a": "a", "b": "ab"}


def oracle_tree_words(max_digits: int) -> set:
    """All W(ab), W in <U, V>, with 2|W(ab)| < max_digits, by BFS on substitutions."""
    seen = set()
    frontier = ["ab"]
    while frontier:
        nxt = []
        for w in frontier:
            if 2 * len(w) >= max_digits or w in seen:
                continue
            seen.add(w)
            for table in (_U, _V):
                nxt.append("".join(table[ch] for ch in w))
        frontier = nxt
    return seen


def oracle_sigma3(n: int) -> list:
    bound = max(3 * n, 5)
    out = set()
    for w in oracle_tree_words(bound):
        d = w.replace("a", "22").replace("b", "11")
        ext = d * (n // len(d) + 2)
        for i in range(len(d)):
            out.add(ext[i : i + n])
    return sorted(out)


# ---------------------------------------------------------------------------
# counting

def comb_enumerate(U: int, m) -> int:
    """Literal enumeration of positive tuples; tiny inputs only."""
    total = 0
    for ell in range(1, U + 1):
        N = int((U - ell) * m)
        for xs in itertools.product(range(1, N + 1), repeat=ell):
            if sum(xs) <= N:
                total += 1
    return total


def comb_closed(U: int, m) -> int:
    """sum_ell C(N_ell, ell): positive ell-tuples with sum <= N number C(N, ell)."""
    import math
    from fractions import Fraction

    return sum(comb(math.floor((U - ell) * Fraction(m)), ell) for ell in range(1, U + 1))


def mp_lambert(x) -> mpmath.mpf:
    with mpmath.workdps(DPS):
        return mpmath.lambertw(mpmath.mpf(x)).real
