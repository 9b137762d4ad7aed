from fractions import Fraction
from itertools import islice

import pytest

from app.models.report_models import RefutationReason, Verdict
from app.utils.chabauty import (
    EXHAUSTIVE,
    LIPSCHITZ,
    certify_triple,
    complement_name,
    embed_closed_subgroup,
    enumerate_counterwitnesses,
    find_complement_ball,
    refute_subgroup,
)
from app.utils.errors import PreconditionFailed
from app.utils.exactreal import dyadic
from app.utils.groups import multiples, subgroup_closed_name
from app.utils.hyperspace import HFinite, HyperCauchyName, parse_set
from app.utils.onepoint import INFINITY
from app.utils.space import Ball


def _name(literal, ops):
    return HyperCauchyName.of(parse_set(literal, ops), label=literal)


def _subgroup(g, ops, k):
    return embed_closed_subgroup(subgroup_closed_name(g, multiples(k), label=f"{k}Z"), g, ops)


def test_singleton_triple_is_certified(z_group, discrete_star):
    certified = certify_triple(z_group, discrete_star, Ball(0, dyadic(5)), Ball(1, dyadic(5)), Ball(-1, dyadic(6)))
    assert certified == (EXHAUSTIVE, dyadic(6))
    assert certify_triple(z_group, discrete_star, Ball(0, dyadic(5)), Ball(1, dyadic(5)), Ball(2, dyadic(6))) is None


def test_real_triple_uses_the_lipschitz_bound(real_group, reals_star):
    certified = certify_triple(real_group, reals_star, Ball(Fraction(0), dyadic(8)), Ball(Fraction(1), dyadic(8)),
                               Ball(Fraction(-1), dyadic(6)))
    assert certified == (LIPSCHITZ, dyadic(6) - 2 * dyadic(8))


def test_emitted_triples_are_sound(z_group, discrete_star):
    triples = [t for t in islice(enumerate_counterwitnesses(z_group, discrete_star), 20000) if t is not None][:5]
    assert len(triples) == 5
    for t in triples:
        assert t.certificate == EXHAUSTIVE
        for ball in (t.b, t.d, t.v):
            assert ball.center is not INFINITY
            assert ball.radius < discrete_star.h(ball.center)
        for x in discrete_star.ball_specials(t.b):
            for y in discrete_star.ball_specials(t.d):
                assert discrete_star.base.distance(t.v.center, x - y) < t.v.radius


def test_mismatched_compactification_is_rejected(z_group, reals_star):
    with pytest.raises(PreconditionFailed):
        refute_subgroup(_name("0,inf", reals_star), z_group, reals_star, 10)


def test_triple_refutes_zero_one_infinity(z_group, discrete_star):
    steps = []
    result = refute_subgroup(_name("0,1,inf", discrete_star), z_group, discrete_star, 100_000, trace=steps)
    assert result.verdict == Verdict.REFUTED
    assert result.reason == RefutationReason.TRIPLE
    assert all(Fraction(m) > 0 for m in result.margins.values())
    assert set(result.margins) == {"b", "d", "v"}
    assert steps and steps[-1]["margins"] == result.margins


@pytest.mark.parametrize("literal, reason", [
    ("1,-1,inf", RefutationReason.MISSING_IDENTITY),
    ("1", RefutationReason.MISSING_IDENTITY),
    ("0", RefutationReason.MISSING_INFINITY),
    ("0,1", RefutationReason.MISSING_INFINITY),
    ("2,inf", RefutationReason.MISSING_IDENTITY),
    ("1,2,inf", RefutationReason.MISSING_IDENTITY),
    ("-1,inf", RefutationReason.MISSING_IDENTITY),
])
def test_separation_refutations(z_group, discrete_star, literal, reason):
    result = refute_subgroup(_name(literal, discrete_star), z_group, discrete_star, 100_000)
    assert result.verdict == Verdict.REFUTED
    assert result.reason == reason
    assert result.steps < 100


@pytest.mark.parametrize("k", [0, 2, 3, 1])
def test_subgroups_survive_a_small_budget(z_group, discrete_star, k):
    result = refute_subgroup(_subgroup(z_group, discrete_star, k), z_group, discrete_star, 3000)
    assert result.verdict == Verdict.NOT_REFUTED
    assert result.steps == 3000


@pytest.mark.slow
def test_even_integers_survive_a_large_budget(z_group, discrete_star):
    result = refute_subgroup(_subgroup(z_group, discrete_star, 2), z_group, discrete_star, 1_000_000)
    assert result.verdict == Verdict.NOT_REFUTED


def test_embedded_subgroups(z_group, discrete_star):
    assert list(_subgroup(z_group, discrete_star, 0).at(2)) == [0, INFINITY]
    assert list(_subgroup(z_group, discrete_star, 2).at(3)) == [0, 2, -2, INFINITY]
    whole = _subgroup(z_group, discrete_star, 1).at(1)
    assert list(whole) == discrete_star.base.specials(4) + [INFINITY]


def test_complement_lists_the_ball_around_one(z_group, discrete_star):
    balls = complement_name(z_group, discrete_star).take(5000)
    around_one = [b for b in balls if list(b.ball.center) == [1]]
    assert around_one
    assert around_one[0].reason == RefutationReason.MISSING_IDENTITY.value


def test_complement_contains_the_ball_around_zero_one_infinity(z_group, discrete_star):
    name = complement_name(z_group, discrete_star)
    assert name.contains_ball(HFinite([0, 1, INFINITY], discrete_star), 7, 30_000) == RefutationReason.TRIPLE.value
    assert name.contains_ball(HFinite([0, INFINITY], discrete_star), 7, 2000) is None


@pytest.mark.parametrize("k", [0, 2, 3])
def test_complement_misses_subgroups(z_group, discrete_star, k):
    assert find_complement_ball(complement_name(z_group, discrete_star), _subgroup(z_group, discrete_star, k), 300) is None


def test_complement_ball_found_for_a_non_subgroup(z_group, discrete_star):
    found = find_complement_ball(complement_name(z_group, discrete_star), _name("1", discrete_star), 5000)
    assert found is not None
