import random
from fractions import Fraction

import pytest

from app.utils.errors import BudgetExhausted, PromiseViolation, UsageError
from app.utils.space import (
    Ball, BallClass, CauchyName, ClosedName, CompactName, CoverSystem, FiniteDiscreteSpace, Membership, OpenName,
    ball_member, basic_balls, calkin_wilf, calkin_wilf_index, cantor_pairs, check_metric_axioms, formal_inclusion,
    membership_stream, metric_between_names, name_from_membership, tuples_by_sum, validate_compact_name,
)

QUARTER, HALF = Fraction(1, 4), Fraction(1, 2)


def test_discrete_enumeration(discrete):
    assert discrete.specials(5) == [0, 1, -1, 2, -2]
    assert [discrete.index_of(p) for p in (0, 1, -1, 2, -2)] == [0, 1, 2, 3, 4]


def test_real_enumeration_follows_calkin_wilf(reals):
    assert reals.specials(7) == [0, 1, -1, Fraction(1, 2), Fraction(-1, 2), 2, -2]
    for k in range(1, 200):
        assert calkin_wilf_index(calkin_wilf(k)) == k
    for i in range(100):
        assert reals.index_of(reals.special(i)) == i


def test_dyadic_literals_are_lsb_first(z2):
    assert z2.format_point(6) == "011"
    assert z2.parse_point("011") == 6
    assert z2.distance(0, 8) == Fraction(1, 8)
    with pytest.raises(UsageError):
        z2.parse_point("012")


def test_formal_inclusion_examples(discrete, reals):
    assert formal_inclusion(Ball(0, QUARTER), Ball(0, HALF), discrete)
    assert not formal_inclusion(Ball(1, QUARTER), Ball(0, HALF), discrete)
    assert formal_inclusion(Ball(HALF, QUARTER), Ball(Fraction(0), Fraction(1)), reals)


def test_ball_membership(discrete, reals):
    assert ball_member(CauchyName.of(0), Ball(0, HALF), discrete) == Membership.CONFIRMED
    assert ball_member(CauchyName.of(1), Ball(0, HALF), discrete) == Membership.REFUTED
    with pytest.raises(BudgetExhausted):
        ball_member(CauchyName.of(Fraction(1, 3)), Ball(Fraction(0), Fraction(1, 3)), reals, budget=16)


def test_metric_between_names(discrete, reals):
    assert metric_between_names(CauchyName.of(2), CauchyName.of(3), 5, discrete) == 1
    x = CauchyName(lambda n: Fraction(round(Fraction(1, 3) * 2 ** (n + 1)), 2 ** (n + 1)))
    y = CauchyName.of(Fraction(1, 6))
    assert abs(metric_between_names(x, y, 8, reals) - Fraction(1, 6)) <= Fraction(1, 256)
    assert metric_between_names(x, x, 8, reals) <= Fraction(1, 256)


def test_validate_compact_name_of_a_singleton(discrete):
    k = discrete.closed_ball_compact_name(0, QUARTER)
    report = validate_compact_name(k, 8, [CauchyName.of(0)], discrete)
    assert report.passed


def test_validate_compact_name_reports_the_missing_level(discrete):
    honest = discrete.closed_ball_compact_name(0, QUARTER)
    broken = CompactName(lambda n: [] if n == 3 else honest.cover_at(n))
    with pytest.raises(PromiseViolation) as exc:
        validate_compact_name(broken, 8, [CauchyName.of(0)], discrete)
    assert exc.value.details["level"] == 3


def test_dyadic_cover_system(z2):
    whole = z2.closed_ball_compact_name(0, Fraction(1))
    rng = random.Random(5)
    paths = [rng.getrandbits(12) for _ in range(5)]
    assert validate_compact_name(whole, 6, [CauchyName.of(p) for p in paths], z2).passed
    assert CoverSystem.of(z2, whole).check_refinement(6).passed


def test_cover_system_restriction(reals):
    system = CoverSystem.of(reals, reals.closed_ball_compact_name(Fraction(0), Fraction(1)))
    restricted = system.restrict(Fraction(1, 2), QUARTER)
    for ball in restricted.cover_at(4):
        assert abs(ball.center - Fraction(1, 2)) <= QUARTER + ball.radius


def test_closed_name_classification(discrete):
    evens = ClosedName.from_predicate(discrete, lambda b: discrete.ball_specials(b) is None
                                      or any(p % 2 == 0 for p in discrete.ball_specials(b)))
    assert evens.classify_ball(Ball(2, HALF), 10) == BallClass.MEETS
    assert evens.classify_ball(Ball(3, HALF), 10) == BallClass.MISSES


def test_closed_name_listing_a_ball_twice_is_a_violation():
    ball = Ball(0, HALF)
    bad = ClosedName(positive=lambda: iter([ball]), negative=OpenName(lambda: iter([ball])))
    with pytest.raises(PromiseViolation):
        bad.classify_ball(ball, 4)


def test_membership_stream_round_trip(reals):
    x = CauchyName.of(Fraction(1, 3))
    rebuilt = name_from_membership(reals, membership_stream(reals, x), steps=5000)
    for n in range(4):
        assert abs(rebuilt.at(n) - Fraction(1, 3)) <= Fraction(1, 2 ** n)


def test_dovetailing_orders():
    pairs = [p for p, _ in zip(cantor_pairs(), range(6))]
    assert pairs == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    triples = [t for t, _ in zip(tuples_by_sum(3), range(4))]
    assert triples == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_basic_balls_of_a_finite_space():
    space = FiniteDiscreteSpace(2)
    balls = [b for b, _ in zip(basic_balls(space), range(5))]
    assert all(b.center in (0, 1) for b in balls)


@pytest.mark.parametrize("key", ["discrete", "reals", "z2"])
def test_metric_axioms(request, key):
    assert check_metric_axioms(request.getfixturevalue(key), 12).passed
