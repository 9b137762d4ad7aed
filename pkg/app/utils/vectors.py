"""
Reproducible test vectors: every worked example value, recomputed by an
independent oracle (closed formulas, set arithmetic, brute force) next to
the library's own answer.
"""
import logging
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Callable, Dict, Iterable, List, Tuple

from app.models.report_models import VectorEntry
from app.utils.chabauty import CounterwitnessTriple, certify_triple, triple_conditions
from app.utils.errors import Mismatch, UsageError
from app.utils.exactreal import ApproxReal, Comparison, approx_compare, dyadic, format_rational
from app.utils.groups import DyadicGroup, IntegerGroup, RealGroup
from app.utils.hyperspace import HFinite, hausdorff_distance, hyper_cover
from app.utils.locally_compact import delta_ball_finiteness_check, proper_remetrize, sigma_sequence
from app.utils.meetgroupoid import EMPTY, Coset, PadicGroupoid
from app.utils.onepoint import INFINITY, compactify
from app.utils.simplegroup import (Single, StageStructure, gcd_ext, generator, introduce_relation, make_form,
                                   normal_form)
from app.utils.space import Ball, CauchyName, DiscreteIntegers, Reals, formal_inclusion, metric_between_names

logger = logging.getLogger(__name__)

Vector = Tuple[str, Callable[[], Any], Callable[[], Any]]


# Independent oracles


def discrete_index(x: int) -> int:
    """Position of x in 0, 1, -1, 2, -2, ..."""
    return 2 * x - 1 if x > 0 else -2 * x


def discrete_h(x: Any) -> Fraction:
    # c_i = 2^-(i+2) and x first enters K_i at its own index
    return Fraction(1, 2 ** (discrete_index(x) + 2))


def discrete_star(a: Any, b: Any) -> Fraction:
    if a is INFINITY and b is INFINITY:
        return Fraction(0)
    if a is INFINITY or b is INFINITY:
        return discrete_h(b if a is INFINITY else a)
    if a == b:
        return Fraction(0)
    return min(Fraction(1), discrete_h(a) + discrete_h(b))


def neighbourhood_hausdorff(a: Iterable[Any], b: Iterable[Any], metric: Callable[[Any, Any], Fraction]) -> Fraction:
    """Least ε among the pairwise distances with A ⊆ N_ε(B) and B ⊆ N_ε(A)."""
    a, b = list(a), list(b)
    for eps in sorted({metric(x, y) for x in a for y in b}):
        if all(any(metric(x, y) <= eps for y in b) for x in a) and \
                all(any(metric(x, y) <= eps for x in a) for y in b):
            return eps
    raise ValueError("empty set")


def add_digit_strings(a: str, b: str) -> str:
    """LSB-first binary addition with carry."""
    out, carry = [], 0
    for i in range(max(len(a), len(b)) + 1):
        s = carry + (int(a[i]) if i < len(a) else 0) + (int(b[i]) if i < len(b) else 0)
        out.append(str(s % 2))
        carry = s // 2
    return "".join(out).rstrip("0") or "0"


def coset_set(a: Coset, carrier: PadicGroupoid, depth: int) -> frozenset:
    """Residues mod p^depth lying in the coset."""
    top = carrier.p ** depth
    if a.is_empty:
        return frozenset()
    m = carrier.modulus(a.level)
    return frozenset(x for x in range(top) if (x - a.residue) % m == 0)


def set_literal(points: frozenset, carrier: PadicGroupoid, depth: int) -> str:
    if not points:
        return "EMPTY"
    top = carrier.p ** depth
    step = top // len(points)
    return f"{min(points)}+{step}Z"


# Vector tables


def _exactreal() -> List[Vector]:
    h0 = compactify(DiscreteIntegers()).h(0)
    return [
        ("compare 1/4 < 1/2", lambda: Comparison.LESS.value,
         lambda: approx_compare(ApproxReal.const(Fraction(1, 4)), ApproxReal.const(Fraction(1, 2)),
                                Fraction(1, 16)).value),
        ("compare 0 ~ 0", lambda: Comparison.WITHIN_MARGIN.value,
         lambda: approx_compare(ApproxReal.const(0), ApproxReal.const(0), Fraction(1, 8)).value),
        ("compare 3/8 > h(0)", lambda: Comparison.GREATER.value if Fraction(3, 8) - discrete_h(0) > Fraction(1, 32)
         else Comparison.WITHIN_MARGIN.value,
         lambda: approx_compare(ApproxReal.const(Fraction(3, 8)), ApproxReal.const(h0), Fraction(1, 32)).value),
        ("dyadic 2^-10", lambda: "1/1024", lambda: format_rational(dyadic(10))),
    ]


def _space() -> List[Vector]:
    z, r = DiscreteIntegers(), Reals()
    return [
        ("inclusion B(1,1/4) in B(0,1/2)", lambda: 1 + Fraction(1, 4) < Fraction(1, 2),
         lambda: formal_inclusion(Ball(1, Fraction(1, 4)), Ball(0, Fraction(1, 2)), z)),
        ("inclusion B(1/2,1/4) in B(0,1)", lambda: Fraction(1, 2) + Fraction(1, 4) < 1,
         lambda: formal_inclusion(Ball(Fraction(1, 2), Fraction(1, 4)), Ball(Fraction(0), Fraction(1)), r)),
        ("discrete distance 2,3", lambda: "1/1",
         lambda: format_rational(metric_between_names(CauchyName.of(2), CauchyName.of(3), 5, z))),
        ("real distance 1/3,1/6", lambda: "1/6",
         lambda: format_rational(metric_between_names(CauchyName.of(Fraction(1, 3)), CauchyName.of(Fraction(1, 6)),
                                                      8, r))),
    ]


def _locally_compact() -> List[Vector]:
    z = DiscreteIntegers()
    ssq = sigma_sequence(z)
    pm = proper_remetrize(z, ssq)
    vectors: List[Vector] = [
        (f"f(x_{k})", lambda k=k: k, lambda k=k: int(pm.f_special(z.special(k)))) for k in range(31)
    ]
    vectors += [
        ("delta(x_1, x_3)", lambda: "3/1", lambda: format_rational(pm.delta_special(z.special(1), z.special(3)))),
        ("delta ball 0 radius 5/2",
         lambda: sorted(str(x) for x in range(-3, 4) if x == 0 or 1 + discrete_index(x) <= Fraction(5, 2)),
         lambda: sorted(delta_ball_finiteness_check(pm, 0, Fraction(5, 2)).points)),
        ("locate -1", lambda: [2, 2], lambda: list(ssq.locate_special(-1))),
    ]
    return vectors


def _onepoint() -> List[Vector]:
    ops = compactify(DiscreteIntegers())
    reals = compactify(Reals())
    points = [0, 1, -1, 2, -2, 3, -3, INFINITY]
    vectors: List[Vector] = [
        (f"h({x})", lambda x=x: format_rational(discrete_h(x)), lambda x=x: format_rational(ops.h(x)))
        for x in points if x is not INFINITY
    ]
    vectors += [
        (f"d*({ops.format_point(a)}, {ops.format_point(b)})", lambda a=a, b=b: format_rational(discrete_star(a, b)),
         lambda a=a, b=b: format_rational(ops.distance(a, b)))
        for a, b in combinations(points, 2)
    ]
    vectors += [
        ("reals h(10)", lambda: format_rational(dyadic(11)), lambda: format_rational(reals.h(Fraction(10)))),
        ("reals h(1/3)", lambda: "1/4", lambda: format_rational(reals.h(Fraction(1, 3)))),
    ]
    return vectors


def _hyperspace() -> List[Vector]:
    ops = compactify(DiscreteIntegers())
    base = [0, 1, -1, INFINITY]
    subsets = [c for size in range(1, len(base) + 1) for c in combinations(base, size)]
    vectors: List[Vector] = [
        ("dH table on {0,1,-1,inf}",
         lambda: [format_rational(neighbourhood_hausdorff(a, b, discrete_star)) for a in subsets for b in subsets],
         lambda: [format_rational(hausdorff_distance(HFinite(a, ops), HFinite(b, ops), ops))
                  for a in subsets for b in subsets]),
        ("hyper_cover(1) size", lambda: 2 ** 5 - 1, lambda: len(hyper_cover(1, ops))),
    ]
    return vectors


def _groups() -> List[Vector]:
    z2 = DyadicGroup()
    fmt = z2.space.format_point
    vectors: List[Vector] = [
        (f"z2 {fmt(a)} + {fmt(b)}", lambda a=a, b=b: add_digit_strings(fmt(a), fmt(b)),
         lambda a=a, b=b: fmt(z2.mul(a, b)))
        for a, b in product(range(8), repeat=2)
    ]
    vectors += [
        ("discrete mul(2, 3)", lambda: 5, lambda: IntegerGroup().mul(2, 3)),
        ("reals inv(1/3)", lambda: "-1/3", lambda: format_rational(RealGroup().inverse(Fraction(1, 3), 20)[0])),
    ]
    return vectors


def _chabauty() -> List[Vector]:
    g, ops = IntegerGroup(), compactify(DiscreteIntegers())
    b, d, v = Ball(0, dyadic(5)), Ball(1, dyadic(5)), Ball(-1, dyadic(6))
    singletons = all(ball.radius < discrete_h(ball.center) for ball in (b, d, v))

    def library_conditions() -> bool:
        certified = certify_triple(g, ops, b, d, v)
        if certified is None:
            return False
        triple = CounterwitnessTriple(b, d, v, certified[0], certified[1], 5, 6)
        return triple_conditions(triple, HFinite([0, 1, INFINITY], ops), 8, ops) is not None

    return [
        ("triple (0, 1, -1) certified", lambda: singletons and 0 - 1 == -1,
         lambda: certify_triple(g, ops, b, d, v) is not None),
        ("triple refutes {0,1,inf}",
         lambda: singletons and min(discrete_star(-1, p) for p in (0, 1, INFINITY)) > dyadic(6) + dyadic(8),
         library_conditions),
    ]


def _simplegroup() -> List[Vector]:
    st = StageStructure(stage=3, largest_constant=3)
    window = range(-3, 4)

    def library_distinct() -> int:
        after = introduce_relation(st, 1, generator(0), Single(7))
        return len({normal_form(after, make_form({0: c0, 1: c1})) for c0, c1 in product(window, repeat=2)})

    pair = StageStructure(stage=0, relations=((4, make_form({2: 11})), (5, make_form({2: 13}))))
    _, a, b = gcd_ext(11, 13)
    return [
        ("b1 = 7 b0 keeps G_3 distinct", lambda: len({c0 + 7 * c1 for c0, c1 in product(window, repeat=2)}),
         library_distinct),
        ("6 b4 - 5 b5 under 11, 13", lambda: 6 * 11 - 5 * 13,
         lambda: dict(normal_form(pair, make_form({4: 6, 5: -5}))).get(2)),
        ("bezout 11, 13", lambda: 1, lambda: 11 * a + 13 * b),
    ]


def _meetgroupoid() -> List[Vector]:
    depth = 4
    w = PadicGroupoid(2)
    elements = w.elements(depth)
    cosets = [a for a in elements if not a.is_empty]

    def oracle_products() -> List[str]:
        out = []
        for a, b in product(cosets, repeat=2):
            if a.level == b.level:
                sums = frozenset((x + y) % 2 ** depth for x in coset_set(a, w, depth) for y in coset_set(b, w, depth))
                out.append(f"{w.literal(a)}·{w.literal(b)}={set_literal(sums, w, depth)}")
        return out

    def library_products() -> List[str]:
        return [f"{w.literal(a)}·{w.literal(b)}={w.literal(w.product(a, b))}"
                for a, b in product(cosets, repeat=2) if w.product(a, b) is not None]

    def oracle_meets() -> List[str]:
        return [f"{w.literal(a)}∩{w.literal(b)}="
                f"{set_literal(coset_set(a, w, depth) & coset_set(b, w, depth), w, depth)}"
                for a, b in product(elements, repeat=2)]

    def library_meets() -> List[str]:
        return [f"{w.literal(a)}∩{w.literal(b)}={w.literal(w.meet(a, b))}" for a, b in product(elements, repeat=2)]

    return [
        ("product table depth 4", oracle_products, library_products),
        ("meet table depth 4", oracle_meets, library_meets),
        ("index 2Z : 8Z", lambda: 8 // 2, lambda: w.index_fn(w.subgroup(1), w.subgroup(3))),
        ("EMPTY · EMPTY", lambda: "EMPTY", lambda: w.literal(w.product(EMPTY, EMPTY))),
    ]


VECTOR_TABLES: Dict[str, Callable[[], List[Vector]]] = {
    "exactreal": _exactreal,
    "space": _space,
    "locally_compact": _locally_compact,
    "onepoint": _onepoint,
    "hyperspace": _hyperspace,
    "groups": _groups,
    "chabauty": _chabauty,
    "simplegroup": _simplegroup,
    "meetgroupoid": _meetgroupoid,
}


def emit_test_vectors(module: str) -> List[VectorEntry]:
    table = VECTOR_TABLES.get(module)
    if table is None:
        raise UsageError(f"No test vectors for {module!r}", {"known": sorted(VECTOR_TABLES)})
    entries = []
    for name, oracle, library in table():
        expected, actual = oracle(), library()
        entries.append(VectorEntry(name=name, oracle=expected, library=actual, agree=expected == actual))
    diverging = [e.name for e in entries if not e.agree]
    if diverging:
        logger.error(f"{module}: {len(diverging)} vectors diverge")
        raise Mismatch(f"{len(diverging)} {module} vectors diverge from their oracle", {"entries": diverging})
    logger.info(f"{module}: {len(entries)} vectors agree")
    return entries
