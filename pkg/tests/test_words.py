import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibcmv import words
from fibcmv.errors import CapExceeded


def _enumerate_factors(text, length):
    """Independent oracle: every window of a long prefix."""
    return {text[i : i + length] for i in range(len(text) - length + 1)}


def test_substitution_examples():
    assert words.substitute("a") == "ab"
    assert words.substitute("b") == "a"
    assert words.substitute("aba") == "abaab"
    print("check substitute: a->ab, b->a, aba->abaab")


def test_fib_word_examples():
    assert words.fib_word(0) == "a"
    assert words.fib_word(2) == "aba"
    assert words.fib_word(5) == "abaababaabaab"
    assert words.fixed_point_prefix(13) == "abaababaabaab"
    assert words.fixed_point_prefix(1) == "a"
    assert words.fixed_point_prefix(3) == "aba"
    print("check fib_word and fixed_point_prefix examples")


def test_fib_word_lengths_and_concatenation():
    for k in range(1, 20):
        w = words.fib_word(k)
        assert len(w) == words.fib_length(k)
        assert words.fib_word(k + 1) == w + words.fib_word(k - 1)
    assert words.fib_lengths(6) == [1, 2, 3, 5, 8, 13, 21]
    print("check |s_k| = F_k and s_{k+1} = s_k s_{k-1} for k < 20")


def test_length_cap():
    old = words.length_cap()
    try:
        words.set_length_cap(100)
        with pytest.raises(CapExceeded):
            words.fib_word(12)
    finally:
        words.set_length_cap(old)
    print("check fib_word raises CapExceeded past the cap")


def test_is_factor_examples():
    assert words.is_factor("aa")
    assert not words.is_factor("bb")
    assert words.is_factor("aba")
    assert not words.is_factor("aaa")
    print("check is_factor: aa yes, bb no, aba yes, aaa no")


def test_complexity_against_enumeration():
    text = words.fixed_point_prefix(5000)
    for ell in range(1, 145):
        got = words.factors(ell)
        assert got == _enumerate_factors(text, ell)
        assert len(got) == ell + 1
    print("check factor sets match enumeration and have l+1 elements, l <= 144")


def test_is_repeatable_examples():
    assert not words.is_repeatable("aa")
    for k in range(1, 10):
        assert words.is_repeatable(words.fixed_point_prefix(words.fib_length(k)))
    with pytest.raises(ValueError):
        words.is_repeatable("bb")
    print("check aa nonrepeatable, prefixes repeatable, bb rejected")


def test_factors_of_doubled_block_are_repeatable():
    for k in range(2, 9):
        w = words.fib_word(k)
        n = len(w)
        ww = w + w
        for i in range(n):
            cand = ww[i : i + n]
            if words.is_factor(cand):
                assert words.is_repeatable(cand)
    print("check every length-F_k factor of s_k s_k is repeatable, k = 2..8")


@pytest.mark.parametrize("k, count, rep", [(2, 4, 3), (3, 6, 5), (4, 9, 8)])
def test_census_examples(k, count, rep):
    c = words.factor_census(k)
    assert (c.count, c.repeatable) == (count, rep)
    text = words.fixed_point_prefix(2000)
    n = words.fib_length(k)
    cells = _enumerate_factors(words.fixed_point_prefix(n) * 2, n)
    bad = [w for w in _enumerate_factors(text, n) if w not in cells]
    assert bad == [c.nonrepeatable_word]
    print(f"check census k={k}: count {count}, repeatable {rep}, odd one {c.nonrepeatable_word}")


def test_census_characterization():
    for k in range(2, 11):
        c = words.factor_census(k)
        assert c.nonrepeatable_word == words.nonrepeatable_characterization(k)
        assert c.as_dict()["F_k"] == words.fib_length(k)
    print("check the nonrepeatable factor sits one letter before the end of s_{k+1} s_k, k <= 10")


def test_subshift_examples():
    u = words.SubshiftPoint("u")
    assert u.window(0, 13) == words.fixed_point_prefix(13)
    assert words.SubshiftPoint("shift", 1).window(0, 5) == "baaba"
    assert words.SubshiftPoint("rotation", 0.0).window(0, 200) == words.fixed_point_prefix(200)
    assert words.SubshiftPoint.parse("shift:3") == words.subshift_point("shift", 3)
    assert words.SubshiftPoint.parse("rot:0.25").parameter == 0.25
    with pytest.raises(ValueError):
        words.SubshiftPoint.parse("bogus")
    print("check subshift windows: u prefix, shift:1 -> baaba, rotation 0 codes u")


def test_subshift_windows_are_factors():
    for j in range(20):
        for pt in (words.SubshiftPoint("shift", j * 7), words.SubshiftPoint("rotation", j / 20)):
            assert words.is_factor(pt.window(-50, 50))
    print("check 100-letter windows at 20 shifts and 20 phases are factors")


def test_left_extension_is_legal():
    u = words.SubshiftPoint("u")
    assert u[-1] == "b" and u[-2] == "a"
    for start in range(-300, 0, 17):
        assert words.is_factor(u.window(start, start + 120))
    print("check windows straddling the origin of the left extension are factors")


def test_repeatable_prefix_lengths():
    assert words.repeatable_prefix_lengths(words.SubshiftPoint("u"), 8) == words.fib_lengths(8)
    assert words.repeatable_prefix_lengths(words.SubshiftPoint("shift", 1), 8)
    assert words.repeatable_prefix_lengths(words.SubshiftPoint("rotation", 0.5), 8)
    print("check repeatable prefix lengths: all for u, nonempty for shift:1 and rot:0.5")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(0, 400))
def test_repeatability_is_rotation_invariant(n, start):
    w = words.fixed_point_prefix(start + n)[start:]
    rots = [w[i:] + w[:i] for i in range(n)]
    vals = {words.is_repeatable(r) for r in rots if words.is_factor(r)}
    assert len(vals) == 1


def test_alphabet_rejects_other_letters():
    with pytest.raises(ValueError):
        words.substitute("abc")
    assert set(itertools.chain.from_iterable(words.factors(10))) <= set(words.ALPHABET)
    print("check letters outside {a, b} are rejected")
