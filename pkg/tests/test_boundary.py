from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_reduced, reduced_words
from stationary_lab.boundary import (
    UNIFORM,
    Cylinder,
    InsufficientDepth,
    StepDistribution,
    act_boundary,
    check_stationarity,
    cylinders_of_depth,
    cylinders_up_to,
    entropy_boundary_exact,
    eta,
    eta_union,
    preimage_cylinder,
    rn_exponent,
)
from stationary_lab.words import IDENTITY, Letter, ReducedWord, inverse, reduce, word


def C(text):
    return Cylinder(word(text))


def brute_preimage_members(g, c):
    """Depth-D cylinders C(w) with g·C(w) inside c, D = |g| + depth(c)."""
    D = len(g) + c.depth
    return [
        cc for cc in cylinders_of_depth(D)
        if act_boundary(g, cc.prefix, c.depth).startswith(c.prefix)
    ]


def oracle_exponent(g, xi):
    """log_3 of eta(g^-1 C)/eta(C) for C the cylinder of xi, where g^-1 C = {z : g z in C}."""
    c = Cylinder(xi)
    ratio = eta_union(preimage_cylinder(g, c)) / eta(c)
    k = 0
    while ratio > 1:
        ratio /= 3
        k += 1
    while ratio < 1:
        ratio *= 3
        k -= 1
    assert ratio == 1
    return k


def test_eta_values():
    assert eta(C("a")) == Fraction(1, 4)
    assert eta(C("ab")) == Fraction(1, 12)
    assert eta(Cylinder()) == 1


def test_eta_additive_over_children_to_depth_8():
    for c in cylinders_up_to(8):
        assert sum(eta(ch) for ch in c.children()) == eta(c)


@pytest.mark.parametrize(
    "g, prefix, depth, expected",
    [("a", "bab", 2, "ab"), ("A", "abab", 2, "ba"), ("ab", "Baba", 2, "aa")],
)
def test_act_boundary_examples(g, prefix, depth, expected):
    assert act_boundary(word(g), word(prefix), depth) == word(expected)


def test_act_boundary_checks_depth():
    with pytest.raises(InsufficientDepth):
        act_boundary(word("ab"), word("ba"), 1)


def test_act_boundary_matches_reduce_oracle(rng):
    for _ in range(2000):
        g = random_reduced(rng, rng.randrange(5))
        xi = random_reduced(rng, len(g) + rng.randrange(1, 6))
        d = len(xi) - len(g)
        assert act_boundary(g, xi, d).letters == reduce(g.letters + xi.letters).letters[:d]


def test_preimage_examples():
    assert preimage_cylinder(word("A"), C("a")) == [C("aa")]
    assert sorted(preimage_cylinder(word("a"), C("a"))) == sorted([C("a"), C("b"), C("B")])
    assert preimage_cylinder(IDENTITY, C("aB")) == [C("aB")]
    assert sorted(brute_preimage_members(word("A"), C("a"))) == [C("aa")]


def _disjoint(cs):
    for i, c in enumerate(cs):
        for d in cs[i + 1:]:
            if c.prefix.startswith(d.prefix) or d.prefix.startswith(c.prefix):
                return False
    return True


def test_preimage_partition_against_brute_force(rng):
    cases = [(g, c) for g in map(word, ["a", "A", "b", "ab", "Ab", "abA", "aab"]) for c in cylinders_up_to(2)]
    for _ in range(60):
        cases.append((random_reduced(rng, rng.randrange(1, 5)), Cylinder(random_reduced(rng, rng.randrange(4)))))
    for g, c in cases:
        pieces = preimage_cylinder(g, c)
        assert _disjoint(pieces)
        members = brute_preimage_members(g, c)
        assert eta_union(pieces) == eta_union(members)
        D = len(g) + c.depth
        assert all(p.depth <= D for p in pieces)
        for m in members:
            assert sum(m.prefix.startswith(p.prefix) for p in pieces) == 1


@pytest.mark.parametrize("g, xi, k", [("a", "ab", 1), ("a", "ba", -1), ("e", "aba", 0), ("ab", "ab", 2), ("ab", "Ba", -2)])
def test_rn_exponent_examples(g, xi, k):
    assert rn_exponent(ReducedWord(g), word(xi)) == k
    if g != "e":
        assert oracle_exponent(ReducedWord(g), word(xi + ("b" if xi[-1] != "B" else "a"))) == k


def test_rn_exponent_matches_cylinder_ratio(rng):
    for _ in range(3000):
        g = random_reduced(rng, rng.randrange(6))
        xi = random_reduced(rng, len(g) + 1 + rng.randrange(4))
        assert rn_exponent(g, xi) == oracle_exponent(g, xi)


def test_rn_exponent_requires_depth():
    with pytest.raises(InsufficientDepth):
        rn_exponent(word("ab"), word("a"))


def test_cocycle_identity_10k(rng):
    # d(gh eta)/d eta (xi) = d(g eta)/d eta (xi) * d(h eta)/d eta (g^-1 xi)
    for _ in range(10_000):
        g = random_reduced(rng, rng.randrange(5))
        h = random_reduced(rng, rng.randrange(5))
        xi = random_reduced(rng, 2 * (len(g) + len(h)) + 1)
        moved = act_boundary(inverse(g), xi, len(h))
        assert rn_exponent(g * h, xi) == rn_exponent(g, xi) + rn_exponent(h, moved)


def test_other_cocycle_ordering_fails_for_this_convention():
    # k(gh, xi) = k(g, h xi) + k(h, xi) would need the opposite derivative convention
    g = h = word("a")
    xi = word("abab")
    assert rn_exponent(g * h, xi) == 0
    assert rn_exponent(g, act_boundary(h, xi, 2)) + rn_exponent(h, xi) == 2


def test_stationarity_hand_value():
    c = C("a")
    terms = [eta_union(preimage_cylinder(ReducedWord([x]), c)) for x in Letter]
    assert terms == [Fraction(3, 4), Fraction(1, 12), Fraction(1, 12), Fraction(1, 12)]
    assert Fraction(1, 4) * sum(terms) == eta(c)


@pytest.mark.parametrize("depth", range(0, 9))
def test_check_stationarity_exact(depth):
    rep = check_stationarity(depth)
    assert rep.passed and rep.worst is None
    assert rep.checked == 1 + 2 * (3**depth - 1)


def test_check_stationarity_detects_wrong_measure():
    lopsided = StepDistribution({Letter.a: Fraction(1, 2), Letter.b: Fraction(1, 2)})
    rep = check_stationarity(2, lopsided)
    assert not rep.passed and rep.worst is not None


def test_entropy_boundary_exact():
    assert entropy_boundary_exact().coefficient == Fraction(1, 2)
    assert entropy_boundary_exact().value == pytest.approx(0.549306144, abs=1e-9)
    only_a = StepDistribution({Letter.a: Fraction(1, 2), Letter.A: Fraction(1, 2)})
    assert entropy_boundary_exact(only_a).coefficient == Fraction(1, 2)
    assert entropy_boundary_exact(exponent=lambda g, xi: 0).coefficient == 0


def test_entropy_boundary_from_deep_cylinder_ratios():
    # independent of the closed-form exponent: integrate oracle ratios over depth-3 cylinders
    q = Fraction(0)
    for x, p in UNIFORM.items():
        g = ReducedWord([x])
        for c in cylinders_of_depth(3):
            q -= p * eta(c) * oracle_exponent(g, c.prefix)
    assert q == Fraction(1, 2)


@given(st.lists(st.integers(0, 6), min_size=4, max_size=4).filter(lambda w: sum(w) > 0))
def test_step_distribution_normalizes(ws):
    total = sum(ws)
    m = StepDistribution({x: Fraction(w, total) for x, w in zip(Letter, ws)})
    assert sum(m.weights.values()) == 1
    with pytest.raises(ValueError):
        StepDistribution({Letter.a: Fraction(1, 2)})
