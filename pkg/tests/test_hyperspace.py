import random
from fractions import Fraction
from itertools import combinations

import pytest

from app.models.report_models import Verdict
from app.utils.errors import BudgetExhausted, PreconditionFailed
from app.utils.exactreal import dyadic
from app.utils.hyperspace import (
    HFinite,
    HyperCauchyName,
    clopen_split_search,
    drop_infinity,
    from_hyper_point,
    hausdorff,
    hausdorff_distance,
    hyper_cover,
    parse_set,
    to_hyper_point,
)
from app.utils.onepoint import INFINITY
from app.utils.registry import compact_space, get_compact
from app.utils.space import Ball, BallClass

SIX = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2), Fraction(7, 2), Fraction(-5, 4)]


def _line(a, b):
    return abs(a - b)


def _neighbourhood_oracle(a, b):
    """Least ε among pairwise distances with A ⊆ N̄_ε(B) and B ⊆ N̄_ε(A)."""
    for eps in sorted({_line(x, y) for x in SIX for y in SIX}):
        if all(any(_line(x, y) <= eps for y in b) for x in a) and all(any(_line(x, y) <= eps for x in a) for y in b):
            return eps
    raise AssertionError("no ε found")


def _subsets(points):
    return [c for size in range(1, len(points) + 1) for c in combinations(points, size)]


def test_hausdorff_matches_brute_force_on_six_points():
    subsets = _subsets(SIX)
    assert len(subsets) ** 2 == 3969
    for a in subsets:
        for b in subsets:
            assert hausdorff(a, b, _line) == _neighbourhood_oracle(a, b)


def test_hausdorff_examples(discrete_star):
    zero_inf = parse_set("0,inf", discrete_star)
    assert hausdorff_distance(zero_inf, zero_inf, discrete_star) == 0
    assert hausdorff_distance(zero_inf, parse_set("inf", discrete_star), discrete_star) == Fraction(1, 4)
    assert hausdorff_distance(parse_set("0", discrete_star), parse_set("1", discrete_star), discrete_star) \
        == Fraction(3, 8)


def test_hausdorff_at_a_precision(discrete_star):
    a, b = parse_set("0,1,inf", discrete_star), parse_set("1,-1", discrete_star)
    exact = hausdorff_distance(a, b, discrete_star)
    assert abs(hausdorff_distance(a, b, discrete_star, 10) - exact) <= dyadic(10)
    assert hausdorff_distance(parse_set("0,inf", discrete_star), parse_set("inf", discrete_star), discrete_star, 0) \
        == Fraction(1, 4)
    with pytest.raises(PreconditionFailed):
        hausdorff_distance(a, b, discrete_star, -1)


def test_set_literals_are_normalised(discrete_star):
    s = parse_set("inf, 1, 0, 1", discrete_star)
    assert list(s) == [0, 1, INFINITY]
    assert s.literal(discrete_star) == "0,1,inf"
    with pytest.raises(PreconditionFailed):
        parse_set("", discrete_star)


def _random_sets(ops, count, seed):
    rng = random.Random(seed)
    pool = ops.specials(12)
    return [HFinite(rng.sample(pool, rng.randint(1, 4)), ops) for _ in range(count)]


def test_hausdorff_is_a_metric(discrete_star):
    sets = _random_sets(discrete_star, 30, 20240607)
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (rng.choice(sets) for _ in range(3))
        ab = hausdorff_distance(a, b, discrete_star)
        assert ab == hausdorff_distance(b, a, discrete_star)
        assert (ab == 0) == (a == b)
        assert hausdorff_distance(a, c, discrete_star) <= ab + hausdorff_distance(b, c, discrete_star)


def test_hyper_cover_size(discrete_star):
    assert len(hyper_cover(1, discrete_star)) == 31


def test_hyper_cover_covers_random_sets(discrete_star):
    probes = _random_sets(discrete_star, 20, 11)
    for n in range(7):
        cover = hyper_cover(n, discrete_star)
        for probe in probes:
            assert any(hausdorff_distance(probe, ball.center, discrete_star) < ball.radius for ball in cover)


def test_hyper_cover_respects_the_centre_limit(discrete_star, settings_env):
    settings_env.setenv("LCLAB_HYPER_CENTER_LIMIT", "4")
    with pytest.raises(BudgetExhausted):
        hyper_cover(1, discrete_star)


def test_to_hyper_point_converges(discrete_star):
    target = HFinite([0, 1, INFINITY], discrete_star)
    name = to_hyper_point(discrete_star.compact_name_of_finite([0, 1, INFINITY]), discrete_star)
    assert list(name.at(0)) == [INFINITY]
    for n in range(9):
        assert hausdorff_distance(name.at(n), target, discrete_star) <= dyadic(n)
    assert name.at(8) == target


def test_from_hyper_point_sides(discrete_star):
    closed = from_hyper_point(HyperCauchyName.of(HFinite([0, INFINITY], discrete_star)), discrete_star)
    assert closed.classify_ball(Ball(0, Fraction(1, 8)), 12) == BallClass.MEETS
    assert closed.classify_ball(Ball(1, Fraction(1, 16)), 12) == BallClass.MISSES


def test_drop_infinity_on_even_integers(discrete_star):
    evens = discrete_star.compact_name_of_closed(lambda x: x % 2 == 0, label="2Z")
    closed = drop_infinity(to_hyper_point(evens, discrete_star), discrete_star)
    assert closed.classify_ball(Ball(1, Fraction(1, 16)), 12) == BallClass.MISSES
    assert closed.classify_ball(Ball(2, Fraction(1, 32)), 12) == BallClass.MEETS
    # too wide to be told apart from ∞
    assert closed.classify_ball(Ball(2, Fraction(1, 2)), 12) == BallClass.UNDECIDED


@pytest.mark.parametrize("key", ["finite-2", "z2"])
def test_split_found(key):
    result = clopen_split_search(get_compact(key), compact_space(key), 10_000)
    assert result.verdict == Verdict.SPLIT
    assert result.level == 0
    assert result.u and result.v
    assert Fraction(result.separation) > 0


def test_interval_has_no_split():
    result = clopen_split_search(get_compact("unit-interval"), compact_space("unit-interval"), 10_000)
    assert result.verdict == Verdict.NONE_FOUND
    assert result.checks <= 10_000
