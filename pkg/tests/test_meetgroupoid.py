import pytest

from app.models.report_models import IdealKind
from app.utils.errors import NotIdempotent, PreconditionFailed, UsageError
from app.utils.meetgroupoid import (
    EMPTY,
    Coset,
    FiniteCyclicGroupoid,
    IdealSpec,
    PadicGroupoid,
    build_ideal,
    check_axioms,
    covers_decide,
    gamma,
    ideal_kind,
    ideal_to_open,
    is_subtree,
    open_to_ideal,
    subgroup_subtree,
    subgroup_violations,
)


class SwappedProduct(PadicGroupoid):
    """W(ℤ₂) with one product table entry replaced."""

    def product(self, a, b):
        if a == b == Coset(1, 1):
            return Coset(1, 1)
        return super().product(a, b)


@pytest.fixture
def w():
    return PadicGroupoid(2)


def test_products(w):
    odd = w.parse("1+2Z")
    assert w.product(odd, odd) == w.parse("0+2Z")
    assert w.product(odd, w.parse("0+4Z")) is None
    assert w.product(EMPTY, EMPTY) == EMPTY
    assert w.product(EMPTY, odd) is None
    assert w.inverse(w.parse("1+4Z")) == w.parse("3+4Z")


def test_meets(w):
    assert w.meet(w.parse("0+2Z"), w.parse("2+4Z")) == w.parse("2+4Z")
    assert w.meet(w.parse("1+2Z"), w.parse("0+4Z")) == EMPTY
    a = w.parse("5+8Z")
    assert w.meet(a, a) == a
    assert w.meet(a, EMPTY) == EMPTY


def test_literals(w):
    assert w.literal(w.parse("-1+4Z")) == "3+4Z"
    assert w.literal(EMPTY) == "EMPTY"
    with pytest.raises(UsageError):
        w.parse("1 mod 4")
    with pytest.raises(UsageError):
        w.parse("1+6Z")
    with pytest.raises(PreconditionFailed):
        PadicGroupoid(4)


def test_index(w):
    assert w.index_fn(w.subgroup(1), w.subgroup(3)) == 4
    assert w.index_fn(w.subgroup(2), w.subgroup(2)) == 1
    assert w.index_fn(w.subgroup(0), w.subgroup(1)) == 2
    with pytest.raises(NotIdempotent):
        w.index_fn(w.parse("1+2Z"), w.subgroup(1))


def test_index_is_multiplicative(w):
    for i in range(5):
        for j in range(i, 5):
            for k in range(j, 5):
                u, v, x = w.subgroup(i), w.subgroup(j), w.subgroup(k)
                assert w.index_fn(u, x) == w.index_fn(u, v) * w.index_fn(v, x)


def test_index_in_a_finite_cyclic_group():
    z12 = FiniteCyclicGroupoid(12)
    assert z12.index_fn(z12.parse("0+2Z"), z12.parse("0+3Z")) == 3
    assert z12.meet(z12.parse("1+2Z"), z12.parse("1+3Z")) == z12.parse("1+6Z")


@pytest.mark.parametrize("carrier", [PadicGroupoid(2), PadicGroupoid(3), FiniteCyclicGroupoid(12)],
                         ids=["z2", "z3", "zmod12"])
def test_axioms_hold(carrier):
    report = check_axioms(carrier, 4)
    assert report.passed, report.failures
    assert report.depth == 4


def test_axiom_report_counts_elements(w):
    assert check_axioms(w, 4).elements == 32
    trivial = check_axioms(w, -1)
    assert trivial.passed and trivial.elements == 1


def test_swapped_product_is_caught():
    report = check_axioms(SwappedProduct(2), 4)
    assert not report.passed
    assert "g" in [f.axiom for f in report.failures]
    g = next(f for f in report.failures if f.axiom == "g")
    assert len(g.witness) == 4


def test_covers(w):
    whole = w.subgroup(0)
    assert covers_decide(w, whole, [w.parse("0+2Z"), w.parse("1+2Z")], 3)
    assert not covers_decide(w, whole, [w.parse("0+2Z")], 3)
    assert covers_decide(w, w.parse("0+4Z"), [w.parse("0+2Z")], 4)
    assert covers_decide(w, whole, [w.parse("0+4Z"), w.parse("2+4Z"), w.parse("1+2Z")], 3)
    with pytest.raises(PreconditionFailed):
        covers_decide(w, w.parse("0+16Z"), [whole], 2)


@pytest.mark.parametrize("k", range(1, 6))
def test_subgroup_ideals_recover_their_subtree(w, k):
    j = build_ideal(f"avoid-subgroup:{2 ** k}", w)
    assert ideal_kind(j, w, 6).kind == IdealKind.CLOSED_SUBGROUP_IDEAL
    nodes = gamma(j, w, 6)
    assert nodes == subgroup_subtree(w, k, 6)
    assert is_subtree(nodes, w, 6)


def test_gamma_of_four_z(w):
    nodes = gamma(build_ideal("avoid-subgroup:4", w), w, 3)
    assert {n for n in nodes if len(n) == 3} == {"000", "001"}


def test_gamma_of_the_trivial_subgroup(w):
    j = build_ideal("avoid-point:0", w)
    assert gamma(j, w, 3) == {"", "0", "00", "000"}
    assert ideal_kind(j, w, 4).kind == IdealKind.CLOSED_SUBGROUP_IDEAL


def test_gamma_of_the_whole_group(w):
    j = build_ideal("empty", w)
    assert ideal_kind(j, w, 4).kind == IdealKind.CLOSED_SUBGROUP_IDEAL
    assert gamma(j, w, 2) == {"", "0", "1", "00", "10", "01", "11"}


def test_avoiding_a_non_identity_point(w):
    j = build_ideal("avoid-point:1", w)
    report = ideal_kind(j, w, 4)
    assert report.conditions["contains_empty"] and report.conditions["ideal"]
    assert report.kind == IdealKind.IDEAL
    assert report.failed_condition == "closed_subgroup"
    assert report.witness == ["1+4Z", "1+4Z", "2+4Z"]
    quarter = w.parse("1+4Z")
    assert (quarter, quarter, w.parse("2+4Z")) in subgroup_violations(j, w, 4)
    assert not report.conditions["inversion"]
    assert report.witnesses["inversion"] == ["3+4Z"]


def test_missing_empty_coset_is_not_an_ideal(w):
    report = ideal_kind(IdealSpec(lambda a: not a.is_empty, "nonempty"), w, 3)
    assert report.kind == IdealKind.NOT_IDEAL
    assert report.failed_condition == "contains_empty"


@pytest.mark.parametrize("text", ["avoid-set:1,2", "avoid-coset:1:2", "avoid-set:0,3"])
def test_non_subgroup_sets_are_refuted(w, text):
    report = ideal_kind(build_ideal(text, w), w, 4)
    assert report.kind != IdealKind.CLOSED_SUBGROUP_IDEAL
    assert report.witness


def test_open_subgroup_ideal(w):
    report = ideal_kind(build_ideal("inside-subgroup:4", w), w, 4)
    assert report.kind == IdealKind.OPEN_SUBGROUP_IDEAL


def test_unknown_ideals_are_rejected(w):
    with pytest.raises(UsageError):
        build_ideal("avoid-everything", w)
    with pytest.raises(UsageError):
        build_ideal("avoid-point:x", w)


def test_open_round_trip(w):
    j = build_ideal("avoid-subgroup:4", w)
    back = open_to_ideal(ideal_to_open(j, w, 5), w, 5)
    assert all(back.member(a) == j.member(a) for a in w.elements(5))


def test_degenerate_open_sets(w):
    everything = open_to_ideal({"0", "1"}, w, 3)
    assert all(everything.member(a) for a in w.elements(3))
    nothing = open_to_ideal(set(), w, 3)
    assert [a for a in w.elements(3) if nothing.member(a)] == [EMPTY]


def test_tree_needs_a_padic_carrier():
    with pytest.raises(PreconditionFailed):
        gamma(build_ideal("empty", FiniteCyclicGroupoid(6)), FiniteCyclicGroupoid(6), 2)
