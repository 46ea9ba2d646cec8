import itertools
import json

import pytest
from hypothesis import given, strategies as st

from markov3.christoffel import (
    ROOT,
    AlphabetPair,
    factorize_over,
    iter_pairs,
    replay,
    sigma3_enumerate,
    to_digits,
)
from markov3.errors import ForbiddenConfiguration, MixedKernel, NonRenormalizable
from markov3.renorm import (
    RenormDecomposition,
    check_weak_renorm,
    expand,
    is_valid_decomposition,
    kernel_exponents,
    length_at_least,
    pair_budget,
    renorm_step,
    renorm_until,
    semi_renorm,
)

D = RenormDecomposition


def reexpand(d):
    # independent of RenormDecomposition.word
    body = "".join({"A": d.pair.alpha, "B": d.pair.beta}[c] for c in d.kernel)
    return d.w1 + body + d.w2


def test_trivial_pair():
    for n in range(1, 9):
        for t in itertools.product("ab", repeat=n):
            w = "".join(t)
            d = check_weak_renorm(w, ROOT)
            assert (d.w1, d.w2) == ("", "")
            assert d.kernel == w.replace("a", "A").replace("b", "B")


def test_check_weak_examples():
    d = check_weak_renorm("abbabb", AlphabetPair("ab", "b", "U"))
    assert (d.w1, d.kernel, d.w2) == ("", "ABAB", "")
    # over (a, ab) a kernel ending with alpha needs |v| = 1 <= |w2|
    bad = D(AlphabetPair("a", "ab", "V"), "", "BA", "")
    assert is_valid_decomposition(bad) is not None
    assert check_weak_renorm("bb", AlphabetPair("a", "ab", "V")) is None


@given(st.text("UV", max_size=5), st.text("AB", min_size=1, max_size=8))
def test_check_weak_finds_planted_kernel(deriv, letters):
    p = replay(deriv)
    w = expand(p, letters)
    d = check_weak_renorm(w, p)
    if d is not None:
        assert reexpand(d) == w
        assert is_valid_decomposition(d) is None
        assert len(d.kernel) >= 1


def test_semi_renorm_examples():
    ext, d = semi_renorm("2" + "1" * 5, ROOT)
    assert ext == "2" + "2" + "1" * 5 + "1"
    ext, d = semi_renorm("2211", ROOT)
    assert ext == "2211"
    assert semi_renorm("121", ROOT) is None


def test_renorm_step_examples():
    out = renorm_step(D(ROOT, "", "ABAB", ""))
    assert (out.pair.alpha, out.pair.beta, out.kernel) == ("a", "ab", "BB")
    out = renorm_step(D(ROOT, "", "AAB", ""))
    assert (out.pair.alpha, out.pair.beta, out.kernel) == ("a", "ab", "AB")
    with pytest.raises(ForbiddenConfiguration):
        renorm_step(D(ROOT, "", "AABB", ""))
    with pytest.raises(NonRenormalizable):
        renorm_step(D(ROOT, "", "", ""))


def test_renorm_until_examples():
    pair, d, trace = renorm_until(to_digits("ab" * 6), length_at_least(4))
    assert 2 * len(pair.word) >= 4 and len(trace) >= 1
    pair, d, trace = renorm_until(to_digits("a" * 10), length_at_least(8))
    assert len(trace) > 1
    for step in trace:
        assert step.pair.alpha == "a" and set(step.kernel) == {"A"}
    with pytest.raises(NonRenormalizable):
        renorm_until("121" + "1" * 5, length_at_least(4))
    tr = json.loads(json.dumps([s.to_json() for s in trace]))
    assert set(tr[0]) == {"pair", "w1", "kernel_letters", "w2", "case_label"}


def test_pair_budget_target():
    t = pair_budget(60)
    assert not t.reached(ROOT)  # 4 digits < 10
    assert t.reached(AlphabetPair("aab", "ab"))


def _check_trace(trace):
    for before, after in zip(trace, trace[1:]):
        assert reexpand(after) == reexpand(before)
        assert is_valid_decomposition(after) is None
        assert len(after.pair.word) > len(before.pair.word)
        # stability: kernels starting with u keep w1; ending with v keep w2
        if before.kernel.startswith("A"):
            assert after.w1 == before.w1
        if before.kernel.endswith("B"):
            assert after.w2 == before.w2


def test_soundness_exhaustive():
    # every ab-word of at most 24 digits, stepped until the kernel empties
    # or the case analysis rules the word out
    outcomes = {"exhausted": 0, "forbidden": 0}
    for n in range(1, 13):
        for t in itertools.product("ab", repeat=n):
            d = check_weak_renorm("".join(t), ROOT)
            steps = [d]
            while d.kernel:
                try:
                    d = renorm_step(d)
                except ForbiddenConfiguration:
                    outcomes["forbidden"] += 1
                    break
                steps.append(d)
            else:
                outcomes["exhausted"] += 1
            _check_trace(steps)
    assert outcomes["exhausted"] > 0 and outcomes["forbidden"] > 0


def test_tree_words_never_forbidden():
    for p in iter_pairs(16):
        for k in (1, 2, 3):
            d = check_weak_renorm(p.word * k, ROOT)
            steps = [d]
            while d.kernel and len(d.pair.word) < len(p.word):
                d = renorm_step(d)
                steps.append(d)
            _check_trace(steps)


def test_sigma3_renormalizes():
    for n in range(1, 13):
        for w in sigma3_enumerate(3 * n):
            pair, d, trace = renorm_until(w, length_at_least(n))
            assert 2 * len(pair.word) >= n
            _check_trace(trace)


def test_sigma3_pair_letters_below_n():
    # the 3n variant: the first pair reaching n digits has both letters shorter than n
    for n in range(3, 13):
        for w in sigma3_enumerate(3 * n):
            pair, _, _ = renorm_until(w, length_at_least(n))
            assert 2 * len(pair.alpha) < n and 2 * len(pair.beta) < n


def test_uniqueness_same_depth():
    by_depth = {}
    for d in itertools.chain.from_iterable(itertools.product("UV", repeat=k) for k in range(7)):
        by_depth.setdefault(len(d), []).append(replay("".join(d)))
    for depth, pairs in by_depth.items():
        for p in pairs:
            for letters in ("AB", "AAB", "ABB", "BAB", "ABAB", "AABAB"):
                w = expand(p, letters)
                for q in pairs:
                    if q != p:
                        assert factorize_over(q, w) is None, (p, q, letters)


def test_kernel_exponent_examples():
    f = kernel_exponents(D(ROOT, "", "AABAAB", ""))
    assert f.exponents == (2, 2) and f.violations == ()
    f = kernel_exponents(D(ROOT, "", "AAAABAB", ""))
    assert any((v.left, v.right) == (4, 1) for v in f.violations)
    f = kernel_exponents(D(ROOT, "", "BA", ""))
    assert f.exponents == (0, 1) and f.shape == "AlphaPowers"
    with pytest.raises(MixedKernel):
        kernel_exponents(D(ROOT, "", "AABB", ""))


@given(st.text("AB", min_size=1, max_size=16))
def test_kernel_form_reexpands(K):
    if "AA" in K and "BB" in K:
        return
    f = kernel_exponents(D(ROOT, "", K, ""))
    assert f.expand() == K


def test_kernel_violations_respect_size_filter():
    d = D(ROOT, "", "AAAABAB", "")
    assert kernel_exponents(d, r=100).violations
    assert kernel_exponents(d, r=5).violations == ()
