"""Renormalization of ab-words over alphabet pairs.

A decomposition writes an ab-word as ``w1 + kernel + w2`` where the kernel
is a word in the letters ``A`` (alpha) and ``B`` (beta) of a pair and the
short words ``w1``, ``w2`` are a suffix and a prefix of ``alpha beta``.
:func:`renorm_step` moves a decomposition over ``(u, v)`` to one over a
child pair, following the four positional cases in each of the two kernel
shapes (no ``vv``, or ``vv`` but no ``uu``).  All lengths here are in
ab-letters; one letter is two digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .cfcore import size_r
from .christoffel import ROOT, AlphabetPair, from_digits, pair_children, to_digits
from .errors import ForbiddenConfiguration, MixedKernel, NonRenormalizable

__all__ = [
    "RenormDecomposition",
    "KernelForm",
    "KernelViolation",
    "Target",
    "length_at_least",
    "pair_budget",
    "expand",
    "parent_parts",
    "is_valid_decomposition",
    "check_weak_renorm",
    "semi_renorm",
    "renorm_step",
    "renorm_until",
    "kernel_exponents",
]


@dataclass(frozen=True)
class RenormDecomposition:
    pair: AlphabetPair
    w1: str
    kernel: str
    w2: str
    case_label: str = ""

    def word(self) -> str:
        return self.w1 + expand(self.pair, self.kernel) + self.w2

    def to_json(self) -> dict:
        return {
            "pair": self.pair.to_json(),
            "w1": self.w1,
            "kernel_letters": self.kernel,
            "w2": self.w2,
            "case_label": self.case_label,
        }


def expand(pair: AlphabetPair, kernel: str) -> str:
    return "".join(pair.alpha if ch == "A" else pair.beta for ch in kernel)


def parent_parts(pair: AlphabetPair) -> Optional[tuple[str, str, str]]:
    """(move, u, v) for the parent (u, v) of ``pair``; None at the root."""
    if not pair.derivation:
        return None
    move = pair.derivation[-1]
    if move == "V":  # (u, uv)
        u = pair.alpha
        return move, u, pair.beta[len(u) :]
    v = pair.beta  # (uv, v)
    return move, pair.alpha[: len(pair.alpha) - len(v)], v


def is_valid_decomposition(d: RenormDecomposition) -> Optional[str]:
    """None when ``d`` satisfies every weak-renormalization condition, else a reason."""
    p = d.pair
    ab = p.alpha + p.beta
    m = max(len(p.alpha), len(p.beta))
    if len(d.w1) >= m or len(d.w2) >= m:
        return "trailing word too long"
    if d.w1 and not ab.endswith(d.w1):
        return "w1 is not a suffix of alpha beta"
    if d.w2 and not ab.startswith(d.w2):
        return "w2 is not a prefix of alpha beta"
    parent = parent_parts(p)
    if parent and d.kernel:
        move, u, v = parent
        if move == "V" and d.kernel.endswith("A") and len(v) > len(d.w2):
            return "kernel ends with alpha but |v| > |w2|"
        if move == "U" and d.kernel.startswith("B") and len(u) > len(d.w1):
            return "kernel starts with beta but |u| > |w1|"
    return None


def check_weak_renorm(w: str, p: AlphabetPair) -> Optional[RenormDecomposition]:
    """The valid decomposition of ``w`` over ``p`` with the longest kernel.

    Ties go to the shortest ``w1``.  Returns None when no decomposition with
    a nonempty kernel exists.
    """
    al, be = p.alpha, p.beta
    m = max(len(al), len(be))
    ab = al + be
    n = len(w)
    best = None
    for i in range(min(m, n + 1)):
        if i and not ab.endswith(w[:i]):
            continue
        back: dict[int, tuple[int, str]] = {i: (-1, "")}
        order = [i]
        for pos in order:
            for piece, letter in ((al, "A"), (be, "B")):
                nxt = pos + len(piece)
                if nxt not in back and w.startswith(piece, pos):
                    back[nxt] = (pos, letter)
                    order.append(nxt)
        for j in sorted(back, reverse=True):
            if j == i or n - j >= m:
                continue
            if best is not None and j - i <= best[0]:
                break
            w2 = w[j:]
            if w2 and not ab.startswith(w2):
                continue
            letters = []
            k = j
            while k != i:
                k, letter = back[k]
                letters.append(letter)
            cand = RenormDecomposition(p, w[:i], "".join(reversed(letters)), w2, "check")
            if is_valid_decomposition(cand) is None:
                best = (j - i, cand)
                break
    return None if best is None else best[1]


_EXTENSIONS = [("", ""), ("", "1"), ("", "2"), ("1", ""), ("2", ""), ("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")]


def semi_renorm(w: str, p: AlphabetPair) -> Optional[tuple[str, RenormDecomposition]]:
    """Extend the digit word ``w`` by at most one digit per side so it renormalizes."""
    for left, right in _EXTENSIONS:
        ext = left + w + right
        ab = from_digits(ext)
        if ab is None:
            continue
        d = check_weak_renorm(ab, p)
        if d is not None:
            return ext, d
    return None


# ---------------------------------------------------------------------------
# one renormalization step

def _split_isolated(kernel: str, sep: str) -> tuple[bool, list[int], int]:
    """Parse kernel = [sep] x^{e_1} sep ... x^{e_k} sep [x^s] for isolated ``sep``.

    Returns (leading sep, [e_1..e_k], s).  Used with sep = 'B' when the
    kernel has no BB.
    """
    lead = kernel.startswith(sep)
    body = kernel[1:] if lead else kernel
    parts = body.split(sep)
    trail = len(parts[-1])
    blocks = [len(x) for x in parts[:-1]]
    return lead, blocks, trail


def _pick_r(short: int, total_uv: int, base: int, step: int) -> Optional[int]:
    """r in {0, 1} with short <= base + r*step < total_uv <= base + (r+1)*step."""
    for r in (0, 1):
        cur = base + r * step
        if short <= cur < total_uv <= cur + step:
            return r
    return None


def renorm_step(d: RenormDecomposition, budget_r: Optional[int] = None) -> RenormDecomposition:
    """Rewrite ``d`` over the child pair chosen by the kernel's shape.

    Raises ForbiddenConfiguration where the case analysis rules the
    configuration out for words with Markov value close to 3.
    """
    if not d.kernel:
        raise NonRenormalizable("empty kernel")
    if budget_r is not None:
        digits = to_digits(d.word())
        if size_r(digits) > budget_r:
            raise ForbiddenConfiguration(f"size_r of the word exceeds {budget_r}")
    u, v = d.pair.alpha, d.pair.beta
    K, w1, w2 = d.kernel, d.w1, d.w2
    has_uu, has_vv = "AA" in K, "BB" in K
    if has_uu and has_vv:
        raise ForbiddenConfiguration("kernel contains both uu and vv")
    parent = parent_parts(d.pair)
    if parent is not None:
        move = parent[0]
        # (u, v) = (eta, eta theta): v-start with uu and long w1 is excluded
        if move == "V" and K.startswith("B") and has_uu and len(w1) >= len(u):
            raise ForbiddenConfiguration("excluded pattern: starts with v, contains uu, |w1| >= |u|")
        # (u, v) = (eta theta, theta): u-end with vv and long w2 is excluded
        if move == "U" and K.endswith("A") and has_vv and len(w2) >= len(v):
            raise ForbiddenConfiguration("excluded pattern: ends with u, contains vv, |w2| >= |v|")
    to_u_uv, to_uv_v = pair_children(d.pair)[1], pair_children(d.pair)[0]
    lu, lv = len(u), len(v)

    if not has_vv:
        lead, blocks, s = _split_isolated(K, "B")
        core = "".join("A" * (e - 1) + "B" for e in blocks)
        if not lead and s == 0:
            # no vv, case 1: u^{e1} v ... u^{ek} v
            out = RenormDecomposition(to_u_uv, w1, core, w2, "no-vv case 1")
        elif lead and s == 0:
            if len(w1) < lu:
                # no vv, case 2 with |w1| < |u|: the leading v joins w1
                out = RenormDecomposition(to_u_uv, w1 + v, core, w2, "no-vv case 2a")
            else:
                # no vv, case 2 with |u| <= |w1| < |v|: needs every e_j = 1
                if any(e != 1 for e in blocks):
                    raise ForbiddenConfiguration("no-vv case 2: u-power above 1 with long w1")
                out = RenormDecomposition(to_uv_v, w1, "B" + "A" * len(blocks), w2, "no-vv case 2b")
        else:
            if lead and len(w1) >= lu:
                # no vv, case 4 with |u| <= |w1| < |v|: needs every e_j = 1 and s = 1
                if any(e != 1 for e in blocks) or s != 1:
                    raise ForbiddenConfiguration("no-vv case 4: u-power above 1 with long w1")
                out = RenormDecomposition(to_uv_v, w1, "B" + "A" * len(blocks), u + w2, "no-vv case 4b")
            else:
                r = _pick_r(lv, lu + lv, len(w2), lu)
                if r is None or r > s:
                    raise ForbiddenConfiguration("no-vv trailing u-power: no admissible r")
                new_w1 = w1 + v if lead else w1
                label = "no-vv case 4a" if lead else "no-vv case 3"
                out = RenormDecomposition(to_u_uv, new_w1, core + "A" * (s - r), u * r + w2, label)
    else:
        lead, blocks, s = _split_isolated(K[::-1], "A")
        # reversed parse: K = [v^s] u v^{e1} ... u v^{ek} [u]
        trail_u = lead
        blocks = blocks[::-1]
        lead_v = s
        core = "".join("A" + "B" * (e - 1) for e in blocks)
        new_w2 = u + w2 if trail_u else w2
        if lead_v == 0:
            # vv present, case 1 (ends with v) or case 2 (ends with u)
            label = "vv case 2" if trail_u else "vv case 1"
            out = RenormDecomposition(to_uv_v, w1, core, new_w2, label)
        else:
            r = _pick_r(lu, lu + lv, len(w1), lv)
            if r is None or r > lead_v:
                raise ForbiddenConfiguration("vv leading v-power: no admissible r")
            label = "vv case 4" if trail_u else "vv case 3"
            out = RenormDecomposition(to_uv_v, w1 + v * r, "B" * (lead_v - r) + core, new_w2, label)

    if out.word() != d.word():
        raise AssertionError(f"renormalization changed the word in {out.case_label}")
    reason = is_valid_decomposition(out)
    if reason is not None:
        raise ForbiddenConfiguration(f"{out.case_label}: {reason}")
    return out


# ---------------------------------------------------------------------------
# iteration

@dataclass(frozen=True)
class Target:
    kind: str  # "length" or "budget"
    value: int

    def reached(self, pair: AlphabetPair) -> bool:
        digits = 2 * (len(pair.alpha) + len(pair.beta))
        if self.kind == "length":
            return digits >= self.value
        return 6 * digits >= self.value


def length_at_least(L: int) -> Target:
    """Stop at the first pair with |alpha beta| >= L digits."""
    return Target("length", L)


def pair_budget(r: int) -> Target:
    """Stop at the first pair with |alpha beta| >= r / 6 digits."""
    return Target("budget", r)


def renorm_until(w: str, target: Target, budget_r: Optional[int] = None):
    """Renormalize the digit word ``w`` until the pair meets ``target``.

    Returns (pair, decomposition, trace) where the trace lists every
    decomposition from the trivial one over (a, b) onward.
    """
    start = semi_renorm(w, ROOT)
    if start is None:
        raise NonRenormalizable(f"{w} has no extension in <a, b>")
    _, d = start
    d = RenormDecomposition(d.pair, d.w1, d.kernel, d.w2, "start")
    trace = [d]
    while not target.reached(d.pair):
        d = renorm_step(d, budget_r)
        trace.append(d)
        if not d.kernel and not target.reached(d.pair):
            raise NonRenormalizable("kernel exhausted before reaching the target")
    return d.pair, d, trace


# ---------------------------------------------------------------------------
# kernel exponent sequences

class KernelViolation(NamedTuple):
    index: int
    kind: str  # "interior", "first" or "last"
    left: int
    right: int


@dataclass(frozen=True)
class KernelForm:
    shape: str  # "AlphaPowers" or "BetaPowers"
    exponents: tuple[int, ...]
    trailing_separator: bool = False
    violations: tuple[KernelViolation, ...] = field(default=())

    def expand(self) -> str:
        power, sep = ("A", "B") if self.shape == "AlphaPowers" else ("B", "A")
        body = sep.join(power * e for e in self.exponents)
        return body + (sep if self.trailing_separator else "")


def kernel_exponents(d: RenormDecomposition, r: Optional[int] = None) -> KernelForm:
    """Exponent sequence of the kernel and its neighbouring-exponent violations.

    ``shape`` names the letter raised to powers; the other letter occurs
    singly.  A trailing separator is recorded as a flag rather than as a
    final zero exponent.  Without ``r`` every index is checked; with ``r``
    only indices whose power passes the size condition are checked.
    """
    K = d.kernel
    if not K:
        raise ValueError("empty kernel")
    if "AA" in K and "BB" in K:
        raise MixedKernel("kernel contains both AA and BB")
    if "BB" in K:
        shape, power, sep = "BetaPowers", "B", "A"
    else:
        shape, power, sep = "AlphaPowers", "A", "B"
    parts = K.split(sep)
    trailing = parts[-1] == "" and len(parts) > 1
    exps = [len(x) for x in parts]
    shown = tuple(exps[:-1]) if trailing else tuple(exps)

    p = d.pair
    theta = p.alpha if power == "A" else p.beta
    other = p.beta if power == "A" else p.alpha
    ab_digits = 2 * (len(p.alpha) + len(p.beta))

    def small(e: int, slack: int) -> bool:
        if r is None:
            return True
        if e == 0:
            return True
        return size_r(to_digits(theta * e)) <= r - slack * ab_digits

    viol = []
    ell = len(exps) - 1
    for i in range(1, ell - 1):
        if abs(exps[i] - exps[i + 1]) > 1 and small(exps[i], 2):
            viol.append(KernelViolation(i, "interior", exps[i], exps[i + 1]))
    if ell >= 1:
        # first exponent: e_1 >= e_0 - 1, with an extra guard for beta-powers
        if exps[1] < exps[0] - 1 and small(exps[0], 2):
            if power == "A" or small(exps[0], 6) or len(other) <= len(theta):
                viol.append(KernelViolation(0, "first", exps[0], exps[1]))
        # last exponent: e_l <= e_{l-1} + 1, with an extra guard for alpha-powers
        if ell - 1 >= 0 and exps[ell] > exps[ell - 1] + 1 and small(exps[ell - 1], 2):
            if power == "B" or small(exps[ell - 1], 6) or len(other) <= len(theta):
                viol.append(KernelViolation(ell - 1, "last", exps[ell - 1], exps[ell]))
    return KernelForm(shape, shown, trailing, tuple(viol))
