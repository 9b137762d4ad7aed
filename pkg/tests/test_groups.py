import random
from fractions import Fraction
from itertools import combinations

import pytest

from app.utils.exactreal import dyadic
from app.utils.groups import (
    IntegerGroup,
    check_group_axioms,
    inv_names,
    mul_names,
    multiples,
    open_inv,
    open_mul,
    sample_triples,
    subgroup_closed_name,
)
from app.utils.registry import get_group
from app.utils.space import Ball, BallClass, CauchyName, OpenName

QUARTER = Fraction(1, 4)


class OffByOne(IntegerGroup):
    key = "off-by-one"

    def mul(self, a, b):
        return a + b + 1


def test_exact_products(z_group, real_group, dyadic_group):
    assert z_group.mul(2, 3) == 5
    fmt = dyadic_group.space.format_point
    assert fmt(mul_names(dyadic_group, CauchyName.of(1), CauchyName.of(1)).at(10)) == "01"
    assert fmt(dyadic_group.mul(3, 1)) == "001"
    inv = inv_names(real_group, CauchyName.of(Fraction(1, 3)))
    assert all(inv.at(n) == Fraction(-1, 3) for n in range(12))


def test_z2_inverse_is_a_residue(dyadic_group):
    inv = inv_names(dyadic_group, CauchyName.of(1))
    for n in range(10):
        assert dyadic_group.space.distance(inv.at(n) + 1, 0) < dyadic(n)


@pytest.mark.parametrize("key", ["discrete-z", "reals", "z2"])
def test_mul_names_on_noisy_names(key):
    g = get_group(key)
    rng = random.Random(20240607)
    for _ in range(100):
        a, b = g.space.special(rng.randrange(40)), g.space.special(rng.randrange(40))
        x = CauchyName(lambda n, a=a: a, label="x")
        y = CauchyName(lambda n, b=b: b, label="y")
        if key == "reals":
            x = CauchyName(lambda n, a=a: a + dyadic(n + 2), label="x")
            y = CauchyName(lambda n, b=b: b - dyadic(n + 3), label="y")
        product = mul_names(g, x, y)
        for n in (0, 4, 9):
            assert g.space.distance(product.at(n), g.mul(a, b)) < dyadic(n)


def test_open_mul_of_singletons(z_group):
    out = open_mul(z_group, OpenName.of([Ball(0, QUARTER)]), OpenName.of([Ball(3, QUARTER)]))
    assert Ball(3, QUARTER) in out.take(50)


def test_open_inv_of_a_singleton(z_group):
    out = open_inv(z_group, OpenName.of([Ball(1, QUARTER)]))
    assert Ball(-1, QUARTER) in out.take(50)


def test_identity_ball_covers_v_in_z2(dyadic_group):
    out = open_mul(dyadic_group, OpenName.of([Ball(0, Fraction(1))]), OpenName.of([Ball(1, QUARTER)]))
    assert Ball(1, QUARTER) in out.take(200)


def test_open_mul_matches_brute_force_products(z_group):
    pool = list(range(-3, 4))
    rng = random.Random(5)
    for _ in range(12):
        u = rng.sample(pool, rng.randint(1, 5))
        v = rng.sample(pool, rng.randint(1, 5))
        out = open_mul(z_group, OpenName.of([Ball(p, QUARTER) for p in u]), OpenName.of([Ball(p, QUARTER) for p in v]))
        assert {b.center for b in out.take(4000)} == {a + b for a in u for b in v}


def test_open_inv_matches_negation(z_group):
    for u in combinations(range(-2, 3), 3):
        out = open_inv(z_group, OpenName.of([Ball(p, QUARTER) for p in u]))
        assert {b.center for b in out.take(200)} == {-p for p in u}


@pytest.mark.parametrize("key", ["discrete-z", "reals", "z2"])
def test_group_axioms_hold(key):
    g = get_group(key)
    report = check_group_axioms(g, sample_triples(g.space, 100, 20240607), 10)
    assert report.passed
    assert report.details["samples"] == 100


def test_group_axioms_hold_for_the_constructed_group():
    g = get_group("free-abelian-simple")
    assert check_group_axioms(g, sample_triples(g.space, 30, 1, window=16), 10).passed


def test_corrupted_mul_is_caught():
    g = OffByOne()
    report = check_group_axioms(g, sample_triples(g.space, 100, 20240607), 10)
    assert not report.passed
    assert report.message == "identity"
    assert len(report.witness) == 3


def test_sampling_is_seeded(discrete):
    assert sample_triples(discrete, 10, 3) == sample_triples(discrete, 10, 3)
    assert sample_triples(discrete, 10, 3) != sample_triples(discrete, 10, 4)


def test_subgroup_closed_name(z_group):
    evens = subgroup_closed_name(z_group, multiples(2), label="2Z")
    assert evens.classify_ball(Ball(4, QUARTER), 1) == BallClass.MEETS
    assert evens.classify_ball(Ball(3, QUARTER), 1) == BallClass.MISSES
    trivial = subgroup_closed_name(z_group, multiples(0))
    assert trivial.classify_ball(Ball(0, QUARTER), 1) == BallClass.MEETS
    assert trivial.classify_ball(Ball(5, Fraction(2)), 1) == BallClass.MEETS
