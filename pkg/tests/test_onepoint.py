import random
from fractions import Fraction

import pytest

from app.utils.errors import BudgetExhausted, IsInfinity, PromiseViolation
from app.utils.exactreal import dyadic
from app.utils.onepoint import INFINITY, compactify
from app.utils.space import Ball, CauchyName


def test_escape_values_on_the_integers(discrete_star):
    assert discrete_star.h(0) == Fraction(1, 4)
    assert discrete_star.h(1) == Fraction(1, 8)
    assert discrete_star.h(-1) == Fraction(1, 16)
    assert discrete_star.h(2) == Fraction(1, 32)


def test_escape_values_on_the_reals(reals_star):
    assert reals_star.h(Fraction(10)) == dyadic(11)
    assert reals_star.h(Fraction(1, 3)) == Fraction(1, 4)


def test_h_is_undefined_at_infinity(discrete_star):
    with pytest.raises(IsInfinity):
        discrete_star.h(INFINITY)


def test_star_distances(discrete_star):
    assert discrete_star.distance(0, 1) == Fraction(3, 8)
    assert discrete_star.distance(0, INFINITY) == Fraction(1, 4)
    assert discrete_star.distance(INFINITY, INFINITY) == 0
    inf = discrete_star.infinity_name()
    assert discrete_star.star_distance(CauchyName.of(0), inf, 10) == Fraction(1, 4)


def test_compact_bases_are_refused(z2):
    with pytest.raises(PromiseViolation):
        compactify(z2)


def test_specials_put_infinity_first(discrete_star):
    assert discrete_star.specials(4) == [INFINITY, 0, 1, -1]
    assert discrete_star.index_of(INFINITY) == 0
    assert discrete_star.parse_point("inf") is INFINITY
    assert discrete_star.format_point(INFINITY) == "inf"


@pytest.mark.parametrize("key", ["discrete_star", "reals_star"])
def test_star_metric_axioms_on_seeded_triples(request, key):
    ops = request.getfixturevalue(key)
    points = ops.specials(40)
    rng = random.Random(20240607)
    for _ in range(200):
        a, b, c = (rng.choice(points) for _ in range(3))
        assert ops.distance(a, b) == ops.distance(b, a)
        assert ops.distance(a, c) <= ops.distance(a, b) + ops.distance(b, c) + dyadic(8)
        assert (ops.distance(a, b) == 0) == (a == b or (a is INFINITY and b is INFINITY))


def test_escape_bound(discrete, discrete_star):
    ssq = discrete_star.ssq
    for p in discrete.specials(50):
        level, _ = ssq.locate_special(p)
        for n in range(min(level, 7)):
            # points outside K_n are within c_{n+1} of infinity
            assert discrete_star.distance(p, INFINITY) <= ssq.c(n + 1) < ssq.c(n)


def test_star_cover_shape(discrete_star):
    cover = discrete_star.star_cover(2)
    assert cover[0] == Ball(INFINITY, Fraction(1, 16))
    assert [b.center for b in cover[1:]] == [0, 1, -1, 2]


@pytest.mark.parametrize("key", ["discrete_star", "reals_star"])
def test_star_cover_covers_probes(request, key):
    ops = request.getfixturevalue(key)
    probes = ops.specials(20)
    for n in range(6):
        cover = ops.star_cover(n)
        for p in probes:
            assert ops.covers(cover, p)


def test_embed_round_trip(discrete_star, reals_star):
    assert discrete_star.unembed(discrete_star.embed(CauchyName.of(7))).at(5) == 7
    with pytest.raises((IsInfinity, BudgetExhausted)):
        discrete_star.unembed(discrete_star.infinity_name())
    third = reals_star.embed(CauchyName.of(Fraction(1, 3)))
    assert reals_star.star_distance(third, reals_star.infinity_name(), 10) == Fraction(1, 4)


def test_unembed_a_non_exact_name(reals_star):
    name = CauchyName(lambda n: Fraction(round(Fraction(5, 2) * 2 ** (n + 1)), 2 ** (n + 1)))
    back = reals_star.unembed(name)
    assert abs(back.at(6) - Fraction(5, 2)) <= dyadic(6)


def test_compact_name_of_a_closed_subset(discrete_star):
    evens = discrete_star.compact_name_of_closed(lambda x: x % 2 == 0, label="2Z")
    cover = evens.cover_at(2)
    assert cover[0].center is INFINITY
    assert {b.center for b in cover[1:]} == {0, 2}
