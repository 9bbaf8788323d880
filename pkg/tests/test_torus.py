import math
import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stationary_lab.torus import (
    GENERATOR_ORDER,
    GENERATORS,
    IDENTITY,
    S,
    T,
    BlowupSpace,
    Fiber,
    IntMatrix,
    PeriodicOrbit,
    ProjLine,
    Regular,
    RegularOnBlownOrbit,
    TorusPointRational,
    TorusPointReal,
    apply_blowup,
    apply_proj,
    apply_torus,
    blowup_metric,
    character_walk_average,
    check_lebesgue_invariance,
    check_orbit_measure_invariance,
    enumerate_orbit,
    enumerate_periodic_orbits,
    factor_map,
    matrix_of_word,
    nonminimality_witness,
    nonminimality_witness_batch,
    random_words,
    word_text,
)

F = Fraction
ORIGIN = TorusPointRational(0, 0)
HALF = TorusPointRational(F(1, 2), 0)
X_AXIS, Y_AXIS = ProjLine(1, 0), ProjLine(0, 1)


def R(x, y):
    return TorusPointRational(F(x), F(y))


def bfs_oracle(p: TorusPointRational) -> set:
    """Closure by repeated sweeps over the full denominator-q grid."""
    q = p.denominator
    grid = [R(F(i, q), F(j, q)) for i in range(q) for j in range(q)]
    reach = {p}
    while True:
        new = {apply_torus(M, x) for x in reach for M in GENERATORS.values()} | reach
        if new == reach:
            break
        reach = new
    assert reach <= set(grid)
    return reach


def random_matrix(r: random.Random, length: int = 6) -> IntMatrix:
    return matrix_of_word("".join(r.choice(GENERATOR_ORDER) for _ in range(length)))


# -- matrices and points ---------------------------------------------------


def test_matrix_validation_and_generators():
    with pytest.raises(ValueError):
        IntMatrix(1, 1, 1, 1)
    assert S @ S.inverse() == IDENTITY and T @ T.inverse() == IDENTITY
    assert (S @ S) @ (S @ S) == IDENTITY
    assert matrix_of_word("st") == S @ T


def test_products_keep_determinant_one():
    r = random.Random(0)
    for _ in range(500):
        M = random_matrix(r, r.randrange(1, 30))
        assert M.a * M.d - M.b * M.c == 1


def test_apply_torus_examples():
    p = R(F(2, 7), F(3, 5))
    assert apply_torus(IDENTITY, p) == p
    assert apply_torus(S, HALF) == R(0, F(1, 2))
    r = random.Random(1)
    for _ in range(100):
        assert apply_torus(random_matrix(r), ORIGIN) == ORIGIN
    q = apply_torus(T, TorusPointReal(0.75, 0.5))
    assert q.as_floats() == (0.25, 0.5)


@given(st.integers(1, 40), st.integers(0, 39), st.integers(0, 39), st.lists(st.sampled_from(GENERATOR_ORDER), max_size=20))
def test_denominator_preserved(q, i, j, letters):
    p = R(F(i % q, q), F(j % q, q))
    image = apply_torus(matrix_of_word("".join(letters)), p)
    assert image.denominator == p.denominator


def test_orbit_examples():
    assert set(enumerate_orbit(ORIGIN)) == {ORIGIN}
    assert set(enumerate_orbit(HALF)) == {HALF, R(0, F(1, 2)), R(F(1, 2), F(1, 2))}
    third = enumerate_orbit(R(F(1, 3), 0))
    assert set(third) == bfs_oracle(R(F(1, 3), 0))
    assert len(third) == 8


@pytest.mark.parametrize("q", range(1, 8))
def test_orbits_match_sweep_oracle(q):
    for i, j in product(range(q), repeat=2):
        p = R(F(i, q), F(j, q))
        assert set(enumerate_orbit(p)) == bfs_oracle(p)


def test_orbit_registry_order():
    orbits = enumerate_periodic_orbits(4)
    assert [len(o) for o in orbits] == [1, 3, 8, 12]
    assert orbits[0].points == (ORIGIN,)
    seen = set()
    for o in orbits:
        assert not seen & set(o.points)
        seen |= set(o.points)


# -- projective lines --------------------------------------------------------


def test_projline_normalization():
    assert ProjLine(-2, 0) == X_AXIS
    assert ProjLine(0, -3) == Y_AXIS
    assert ProjLine(-1, -1) == ProjLine(1, 1)
    with pytest.raises(ValueError):
        ProjLine(0, 0)


def test_apply_proj_examples():
    r = random.Random(2)
    ell = ProjLine(0.3, -0.8)
    assert apply_proj(IDENTITY, ell) == ell
    assert apply_proj(S, X_AXIS) == Y_AXIS
    for _ in range(200):
        M = random_matrix(r)
        neg = IntMatrix(-M.a, -M.b, -M.c, -M.d)
        ell = ProjLine(r.uniform(-1, 1), r.uniform(-1, 1))
        a, b = apply_proj(M, ell), apply_proj(neg, ell)
        assert math.isclose(a.u, b.u, abs_tol=1e-12) and math.isclose(a.v, b.v, abs_tol=1e-12)


# -- blow-up -----------------------------------------------------------------


@pytest.fixture(scope="module")
def space():
    return BlowupSpace.first(2)


def test_apply_blowup_examples(space):
    f = Fiber(0, ORIGIN, X_AXIS)
    assert apply_blowup(IDENTITY, f, space) == f
    assert apply_blowup(S, f, space) == Fiber(0, ORIGIN, Y_AXIS)
    g = Regular(TorusPointReal(0.1, 0.7))
    assert apply_blowup(T, g, space) == Regular(apply_torus(T, g.point))
    with pytest.raises(RegularOnBlownOrbit):
        apply_blowup(S, Regular(HALF), space)


def test_space_fiber_requires_registered_base(space):
    assert space.fiber(HALF, X_AXIS).orbit_id == 1
    with pytest.raises(ValueError):
        space.fiber(R(F(1, 3), 0), X_AXIS)
    assert [space.epsilon(n) for n in range(4)] == [1.0, 0.5, 0.25, 0.125]


def _random_blowup_point(r: random.Random, space: BlowupSpace):
    kind = r.random()
    if kind < 0.4:
        n = r.randrange(len(space.orbits))
        base = r.choice(space.orbits[n].points)
        return Fiber(n, base, ProjLine(r.uniform(-1, 1), r.uniform(-1, 1)))
    if kind < 0.7:
        # regular points close to a blown-up point exercise the chord term
        base = r.choice(r.choice(space.orbits).points)
        rad, th = r.uniform(1e-4, 0.3), r.uniform(0, 2 * math.pi)
        return Regular(TorusPointReal(float(base.x) + rad * math.cos(th), float(base.y) + rad * math.sin(th)))
    return Regular(TorusPointReal(r.random(), r.random()))


def test_equivariance_10k(space):
    r = random.Random(3)
    for _ in range(10_000):
        M = random_matrix(r, r.randrange(1, 8))
        p = _random_blowup_point(r, space)
        if isinstance(p, Fiber):
            assert factor_map(apply_blowup(M, p, space)) == apply_torus(M, factor_map(p))
        else:
            a = factor_map(apply_blowup(M, p, space)).as_floats()
            b = apply_torus(M, factor_map(p)).as_floats()
            assert a == b


def test_metric_examples(space):
    f = Fiber(1, HALF, X_AXIS)
    assert blowup_metric(f, f, space) == 0
    for n, base in [(0, ORIGIN), (1, HALF)]:
        d = blowup_metric(Fiber(n, base, X_AXIS), Fiber(n, base, Y_AXIS), space)
        assert d == pytest.approx(space.epsilon(n), abs=1e-15)
    p, q = TorusPointReal(0.3, 0.3), TorusPointReal(0.35, 0.2)
    assert blowup_metric(Regular(p), Regular(q), space) == pytest.approx(math.hypot(0.05, 0.1), abs=1e-15)


def test_metric_realizes_chord_convergence(space):
    # regular points approaching (0,0) along the x axis converge to the fiber point with line (1:0)
    target = Fiber(0, ORIGIN, X_AXIS)
    other = Fiber(0, ORIGIN, Y_AXIS)
    ds = [blowup_metric(Regular(TorusPointReal(h, 0.0)), target, space) for h in (1e-1, 1e-2, 1e-3, 1e-5)]
    assert all(a > b for a, b in zip(ds, ds[1:])) and ds[-1] < 1e-3
    far = blowup_metric(Regular(TorusPointReal(1e-5, 0.0)), other, space)
    assert far > 0.9 * space.epsilon(0)


def test_metric_axioms_10k_triples(space):
    r = random.Random(4)
    for _ in range(10_000):
        p, q, w = (_random_blowup_point(r, space) for _ in range(3))
        dpq, dqw, dpw = blowup_metric(p, q, space), blowup_metric(q, w, space), blowup_metric(p, w, space)
        assert dpq >= 0
        assert dpq == pytest.approx(blowup_metric(q, p, space), abs=1e-12)
        assert dpw <= dpq + dqw + 1e-9
        if p != q:
            assert dpq > 0


# -- invariant measures ------------------------------------------------------


def test_lebesgue_invariance():
    assert check_lebesgue_invariance(IDENTITY, 5).passed
    rep = check_lebesgue_invariance(S, 20)
    assert rep.passed and rep.checked == 41 * 41 - 1
    r = random.Random(5)
    for _ in range(20):
        assert check_lebesgue_invariance(random_matrix(r), 6).passed
    bad = check_lebesgue_invariance(((0, 0), (0, 1)), 3)
    assert not bad.passed and (1, 0) in bad.failures


def test_orbit_measure_invariance():
    assert check_orbit_measure_invariance(enumerate_orbit(ORIGIN)).passed
    assert check_orbit_measure_invariance(enumerate_orbit(HALF)).passed
    assert check_orbit_measure_invariance(enumerate_orbit(R(F(2, 5), F(1, 5)))).passed
    rep = check_orbit_measure_invariance([HALF, R(0, F(1, 2))])
    assert not rep.passed


def test_permutation_table_rejects_unclosed_set():
    broken = BlowupSpace([PeriodicOrbit.of([HALF, R(0, F(1, 2))])])
    with pytest.raises(ValueError):
        broken.permutation_table(0)


# -- witness -----------------------------------------------------------------


def test_witness_empty_word(space):
    rep = nonminimality_witness(space, "", Fiber(1, HALF, X_AXIS))
    assert rep.stays_in_fiber and rep.steps == 0 and rep.visited_bases == [HALF]


def test_witness_rejects_bad_letters(space):
    with pytest.raises(ValueError):
        nonminimality_witness(space, "sx", Fiber(0, ORIGIN, X_AXIS))


@pytest.mark.parametrize("orbit_id, base", [(0, ORIGIN), (1, HALF)])
def test_single_witness_long_word(space, orbit_id, base):
    words = random_words(11, 1, 10_000)
    rep = nonminimality_witness(space, word_text(words[0]), Fiber(orbit_id, base, X_AXIS))
    assert rep.stays_in_fiber and rep.steps == 10_000
    assert set(rep.visited_bases) <= set(space.orbits[orbit_id].points)
    if orbit_id == 1:
        assert len(set(rep.visited_bases)) == 3


def test_batch_agrees_with_single_witness(space):
    start = Fiber(1, HALF, ProjLine(2, 1))
    words = random_words(12, 30, 40)
    stayed, idx, vec = nonminimality_witness_batch(space, words, start)
    assert stayed
    orb = space.orbits[1]
    for j, row in enumerate(words):
        p = start
        for ch in word_text(row):
            p = apply_blowup(GENERATORS[ch], p, space)
        assert orb.points[idx[j]] == p.base
        got = ProjLine(*vec[j])
        assert math.isclose(got.u, p.line.u, abs_tol=1e-9) and math.isclose(got.v, p.line.v, abs_tol=1e-9)


# -- equidistribution evidence ---------------------------------------------


def test_character_average_fixed_point_is_one():
    assert character_walk_average(7, 1000, ORIGIN, (1, 0)) == pytest.approx(1.0)


def test_character_average_rejects_trivial_character():
    with pytest.raises(ValueError):
        character_walk_average(7, 10, ORIGIN, (0, 0))
    with pytest.raises(ValueError):
        character_walk_average(7, 10, ORIGIN, (1, 0), walk_m=[F(1, 2)] * 4)


def test_character_average_on_a_finite_orbit_is_exact():
    # orbit of (1/2, 0): characters take values +-1; average stays rational-exact in phase
    v = character_walk_average(3, 2000, HALF, (1, 1))
    assert 0 <= v <= 1


def test_character_average_generic_start_is_small():
    start = TorusPointReal(math.sqrt(2) - 1, math.sqrt(3) - 1)
    assert character_walk_average(7, 20_000, start, (1, 0)) < 0.05
    a = character_walk_average(7, 2000, start, (0, 1))
    assert a == character_walk_average(7, 2000, start, (0, 1))


def test_words_are_seeded():
    assert np.array_equal(random_words(5, 3, 10), random_words(5, 3, 10))
    assert set(np.unique(random_words(5, 50, 50)).tolist()) == {0, 1, 2, 3}
