"""The Nielsen substitution tree and the pre-3 word sets.

Words over ``{a, b}`` stand for digit words through ``a = 22`` and
``b = 11``.  Pairs ``(alpha, beta)`` form a binary tree rooted at ``(a, b)``
with children ``(alpha beta, beta)`` (move ``U``) and ``(alpha, alpha beta)``
(move ``V``).  The length ratio ``|alpha| / |beta|`` walks the Calkin-Wilf
tree, so every reduced fraction labels exactly one pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional

from .errors import NotReduced, PrefixMismatch

__all__ = [
    "LETTER_DIGITS",
    "AlphabetPair",
    "ROOT",
    "to_digits",
    "from_digits",
    "substitute",
    "apply_derivation",
    "pair_children",
    "replay",
    "b_first",
    "a_last",
    "factorize_over",
    "slope",
    "pair_from_slope",
    "iter_pairs",
    "tree_words",
    "min_containing_tree_word",
    "sigma3_enumerate",
    "sigma3_count",
]

LETTER_DIGITS = {"a": "22", "b": "11"}


def to_digits(w: str) -> str:
    return "".join(LETTER_DIGITS[ch] for ch in w)


def from_digits(digits: str) -> Optional[str]:
    """The ab-word spelling ``digits``, or None if it is not in <a, b>."""
    if len(digits) % 2:
        return None
    out = []
    for i in range(0, len(digits), 2):
        pair = digits[i : i + 2]
        if pair == "22":
            out.append("a")
        elif pair == "11":
            out.append("b")
        else:
            return None
    return "".join(out)


_SUBST = {
    "U": {"a": "ab", "b": "b"},
    "V": {"a": "a", "b": "ab"},
}


def substitute(w: str, g: str) -> str:
    table = _SUBST[g]
    return "".join(table[ch] for ch in w)


def apply_derivation(derivation: str, w: str = "ab") -> str:
    """W(w) for W the composition of the moves, first move outermost."""
    for g in reversed(derivation):
        w = substitute(w, g)
    return w


@dataclass(frozen=True)
class AlphabetPair:
    alpha: str
    beta: str
    derivation: str = ""

    @property
    def word(self) -> str:
        """The concatenation alpha beta."""
        return self.alpha + self.beta

    @property
    def slope(self) -> tuple[int, int]:
        return slope(self)

    def digit_lengths(self) -> tuple[int, int]:
        return 2 * len(self.alpha), 2 * len(self.beta)

    def to_json(self) -> dict:
        return {"derivation": self.derivation, "alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_json(cls, obj) -> "AlphabetPair":
        return cls(obj["alpha"], obj["beta"], obj.get("derivation", ""))


ROOT = AlphabetPair("a", "b", "")


def pair_children(p: AlphabetPair) -> tuple[AlphabetPair, AlphabetPair]:
    ab = p.alpha + p.beta
    return (
        AlphabetPair(ab, p.beta, p.derivation + "U"),
        AlphabetPair(p.alpha, ab, p.derivation + "V"),
    )


def replay(derivation: str) -> AlphabetPair:
    p = ROOT
    for move in derivation:
        u, v = pair_children(p)
        p = u if move == "U" else v
    return p


def b_first(w: str) -> str:
    if not w.startswith("a"):
        raise PrefixMismatch("b_first needs a word starting with a")
    return "b" + w[1:]


def a_last(w: str) -> str:
    if not w.endswith("b"):
        raise PrefixMismatch("a_last needs a word ending with b")
    return w[:-1] + "a"


def factorize_over(p: AlphabetPair, w: str) -> Optional[list[str]]:
    """Split ``w`` into copies of alpha and beta, as letters 'A' and 'B'.

    Backtracking over the two choices; alpha and beta form a code, so the
    split is unique when one exists.  Returns None on failure.
    """
    al, be = p.alpha, p.beta
    n = len(w)
    reach: list[Optional[tuple[int, str]]] = [None] * (n + 1)
    reach[0] = (-1, "")
    for i in range(n):
        if reach[i] is None:
            continue
        if w.startswith(al, i) and reach[i + len(al)] is None:
            reach[i + len(al)] = (i, "A")
        if w.startswith(be, i) and reach[i + len(be)] is None:
            reach[i + len(be)] = (i, "B")
    if reach[n] is None:
        return None
    out = []
    j = n
    while j > 0:
        i, letter = reach[j]
        out.append(letter)
        j = i
    return out[::-1]


def slope(p: AlphabetPair) -> tuple[int, int]:
    a, b = len(p.alpha), len(p.beta)
    g = gcd(a, b)
    return a // g, b // g


def pair_from_slope(p: int, q: int) -> AlphabetPair:
    """The pair whose length ratio is p/q (in lowest terms)."""
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise NotReduced(f"{p}/{q} is not a reduced positive fraction")
    moves = []
    while (p, q) != (1, 1):
        if p > q:
            moves.append("U")
            p -= q
        else:
            moves.append("V")
            q -= p
    return replay("".join(reversed(moves)))


def iter_pairs(max_letters: int) -> Iterator[AlphabetPair]:
    """All pairs with |alpha| + |beta| <= max_letters (in letters), depth first."""
    stack = [ROOT]
    while stack:
        p = stack.pop()
        if len(p.alpha) + len(p.beta) > max_letters:
            continue
        yield p
        u, v = pair_children(p)
        stack.append(v)
        stack.append(u)


def tree_words(max_digits: int) -> list[str]:
    """Tree words W(ab) of digit length < max_digits, as ab-words, sorted by length."""
    out = [p.word for p in iter_pairs((max_digits - 1) // 2)]
    out.sort(key=lambda w: (len(w), w))
    return out


def _search_bound(n: int) -> int:
    # digit-length cutoff 3n, floored so that the shortest tree word ab
    # (4 digits) is always searched; single digits need it
    return max(3 * n, 5)


def min_containing_tree_word(w: str, max_digits: Optional[int] = None) -> Optional[str]:
    """A shortest tree word containing the digit word ``w`` as a factor.

    The search stops below ``max_digits`` (default 3|w|); None means no tree
    word that short contains ``w``.  Digit words with a lone boundary digit,
    such as ``12``, can need up to 3|w| + 6 digits.
    """
    best = None
    bound = _search_bound(len(w)) if max_digits is None else max_digits
    for t in tree_words(bound):
        if best is not None and len(t) > len(best):
            break
        if w in to_digits(t):
            if best is None or t < best:
                best = t
    return best


def _cyclic_factors(digits: str, n: int, out: set) -> None:
    ext = digits * (n // len(digits) + 2)
    for i in range(len(digits)):
        out.add(ext[i : i + n])


def sigma3_enumerate(n: int) -> list[str]:
    """All length-n factors of the periodic words W(ab)^Z with |W(ab)| < 3n.

    Every such factor lies in Sigma(3, n), and every word of Sigma(3, n) is
    a factor of a tree word shorter than 3n digits, so this is exactly
    Sigma(3, n), sorted with 1 < 2.
    """
    if n < 1:
        raise ValueError("n must be positive")
    found: set = set()
    for p in iter_pairs((_search_bound(n) - 1) // 2):
        _cyclic_factors(to_digits(p.word), n, found)
    return sorted(found)


def sigma3_count(n: int) -> int:
    """|Sigma(3, n)| without sorting or returning the words."""
    found: set = set()
    for p in iter_pairs((_search_bound(n) - 1) // 2):
        d = to_digits(p.word)
        ext = d * (n // len(d) + 2)
        for i in range(len(d)):
            found.add(ext[i : i + n])
    return len(found)
