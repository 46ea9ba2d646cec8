import itertools
import json

import pytest
from hypothesis import given, strategies as st

from markov3.christoffel import (
    ROOT,
    AlphabetPair,
    a_last,
    apply_derivation,
    b_first,
    factorize_over,
    from_digits,
    iter_pairs,
    min_containing_tree_word,
    pair_children,
    pair_from_slope,
    replay,
    sigma3_count,
    sigma3_enumerate,
    slope,
    substitute,
    to_digits,
)
from markov3.errors import NotReduced, PrefixMismatch
from markov3.words import forbidden_patterns

from oracles import oracle_sigma3, oracle_tree_words


def derivations(max_len):
    for n in range(max_len + 1):
        for t in itertools.product("UV", repeat=n):
            yield "".join(t)


def ab_words(max_len):
    for n in range(max_len + 1):
        for t in itertools.product("ab", repeat=n):
            yield "".join(t)


def test_substitute_examples():
    assert substitute("ab", "U") == "abb"
    assert substitute("ab", "V") == "aab"
    assert substitute(substitute("ab", "V"), "U") == "ababb"
    assert apply_derivation("UV") == "ababb"


@given(st.text("ab", max_size=20))
def test_substitute_lengths(w):
    assert len(substitute(w, "U")) == len(w) + w.count("a")
    assert len(substitute(w, "V")) == len(w) + w.count("b")


def test_digit_spelling():
    assert to_digits("ab") == "2211"
    assert from_digits("2211") == "ab"
    assert from_digits("2121") is None
    assert from_digits("221") is None


def test_pair_children_examples():
    u, v = pair_children(ROOT)
    assert (u.alpha, u.beta) == ("ab", "b")
    assert (v.alpha, v.beta) == ("a", "ab")
    uu, _ = pair_children(u)
    assert (uu.alpha, uu.beta, uu.derivation) == ("abb", "b", "UU")


def test_pair_json_round_trip():
    p = replay("UVVU")
    assert AlphabetPair.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_tree_word_identity():
    for d in derivations(10):
        p = replay(d)
        assert p.word == apply_derivation(d)
        assert p.alpha.startswith("a") and p.beta.endswith("b")


def test_tree_words_match_oracle():
    ours = {p.word for p in iter_pairs(12)}
    assert ours == oracle_tree_words(25)


def test_b_first_a_last_examples():
    assert b_first("ab") == "bb"
    assert a_last("ab") == "aa"
    with pytest.raises(PrefixMismatch):
        b_first("ba")
    with pytest.raises(PrefixMismatch):
        a_last("ba")


def test_concatenation_identity_and_palindromes():
    for d in derivations(10):
        p = replay(d)
        bf, al = b_first(p.alpha), a_last(p.beta)
        assert p.word == al + bf
        if len(d) <= 8:
            assert bf == bf[::-1] and al == al[::-1]


def test_reverse_identities():
    for w in ab_words(8):
        assert "b" + substitute(w[::-1], "U") == substitute(w, "U")[::-1] + "b"
        assert substitute(w[::-1], "V") + "a" == "a" + substitute(w, "V")[::-1]


def test_structure_powers():
    for d in derivations(8):
        p = replay(d)
        al, bf = a_last(p.beta), b_first(p.alpha)
        for k in range(1, 5):
            assert (p.alpha * k + p.beta).startswith(al)
            assert (p.alpha + p.beta * k).endswith(bf)


def test_factorize_examples():
    assert factorize_over(AlphabetPair("a", "ab"), "aabab") == ["A", "B", "B"]
    assert factorize_over(AlphabetPair("ab", "b"), "abbb") == ["A", "B", "B"]
    assert factorize_over(ROOT, "abba") == ["A", "B", "B", "A"]
    assert factorize_over(AlphabetPair("ab", "b"), "ba") is None


@given(st.text("UV", max_size=6), st.text("AB", max_size=8))
def test_factorize_round_trip(d, letters):
    p = replay(d)
    w = "".join(p.alpha if c == "A" else p.beta for c in letters)
    assert factorize_over(p, w) == list(letters)


def test_slope_examples():
    assert pair_from_slope(1, 1) == ROOT
    assert (pair_from_slope(2, 1).alpha, pair_from_slope(2, 1).beta) == ("ab", "b")
    with pytest.raises(NotReduced):
        pair_from_slope(2, 2)
    with pytest.raises(NotReduced):
        pair_from_slope(0, 1)


def test_slope_round_trip():
    for d in derivations(10):
        p = replay(d)
        assert pair_from_slope(*slope(p)) == p


def test_min_containing_examples():
    t = min_containing_tree_word("22")
    assert len(to_digits(t)) <= 4
    ratios = []
    for k in range(2, 7):
        w = to_digits("ba" + "b" * (k + 1) + "a")
        t = min_containing_tree_word(w)
        assert t == "a" + "b" * k + "a" + "b" * (k + 1) + "a" + "b" * (k + 1)
        ratios.append(len(w) / len(to_digits(t)))
    assert ratios == sorted(ratios, reverse=True) and ratios[-1] - 1 / 3 < 0.11
    assert min_containing_tree_word("121") is None
    assert min_containing_tree_word("121", 40) is None


def test_no_tree_word_contains_121_or_212():
    for w in oracle_tree_words(19):
        d = to_digits(w) * 2
        assert "121" not in d and "212" not in d


def test_shortest_container_letter_bound():
    pool = [p.word for p in iter_pairs(30)]
    for w in ab_words(8):
        if not w:
            continue
        lengths = [len(t) for t in pool if w in t]
        if lengths:
            assert min(lengths) < 3 * len(w)


def test_shortest_container_digit_words():
    # a boundary digit can push the container past 3|w|, never past 3|w| + 6
    for n in range(1, 11):
        for w in sigma3_enumerate(n):
            t = min_containing_tree_word(w, 3 * n + 6)
            assert t is not None and w in to_digits(t)
            short = min_containing_tree_word(w)
            assert short is None or short == t
    assert min_containing_tree_word("12") is None
    assert min_containing_tree_word("12", 12) == "aabab"


def test_sigma3_examples():
    assert sigma3_enumerate(2) == ["11", "12", "21", "22"]
    assert sigma3_enumerate(3) == ["111", "112", "122", "211", "221", "222"]
    s4 = sigma3_enumerate(4)
    assert "2211" in s4 and "1122" in s4 and len(s4) <= 9 * 64


@pytest.mark.parametrize("n", range(1, 25))
def test_sigma3_matches_oracle(n):
    assert sigma3_enumerate(n) == oracle_sigma3(n)


def test_sigma3_counting_bound():
    for n in list(range(1, 61)) + [80, 100, 150, 200]:
        assert sigma3_count(n) <= 9 * n**3
    for n in range(1, 40):
        assert sigma3_count(n) == len(sigma3_enumerate(n))


def test_sigma3_factor_closure_and_patterns():
    prev = set(sigma3_enumerate(1))
    for n in range(2, 30):
        cur = sigma3_enumerate(n)
        assert cur == sorted(cur)
        for w in cur:
            assert w[1:] in prev and w[:-1] in prev
            assert forbidden_patterns(w, 100) == []
        prev = set(cur)
