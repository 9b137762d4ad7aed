"""
The hyperspace K(M*) of non-empty closed subsets under the Hausdorff metric,
its explicit covers, the point/closed-set correspondence and the clopen
split detector.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from app.config import get_settings
from app.models.report_models import BallModel, SplitResult, Verdict
from app.utils.errors import BudgetExhausted, PreconditionFailed
from app.utils.exactreal import ApproxReal, dyadic, format_rational, interval_eval, rmax, rmin, rsup
from app.utils.onepoint import INFINITY, OnePointSpace
from app.utils.space import Ball, ClosedName, CompactName, OpenName, PolishSpace, basic_balls, cantor_pairs

logger = logging.getLogger(__name__)


class HFinite(tuple):
    """Non-empty finite set of specials, sorted by index with ∞ last."""

    def __new__(cls, elements: Iterable[Any], space: PolishSpace):
        unique = list(dict.fromkeys(elements))
        if not unique:
            raise PreconditionFailed("Hyperspace specials are non-empty")
        unique.sort(key=lambda p: (p is INFINITY, space.index_of(p) if p is not INFINITY else 0))
        return super().__new__(cls, unique)

    def literal(self, space: PolishSpace) -> str:
        return ",".join(space.format_point(p) for p in self)


def parse_set(text: str, space: PolishSpace) -> HFinite:
    return HFinite((space.parse_point(t) for t in text.split(",") if t.strip()), space)


def hausdorff(a: Sequence[Any], b: Sequence[Any], metric: Callable[[Any, Any], Fraction]) -> Fraction:
    """max of the two directed max-min distances."""
    forward = max(min(metric(x, y) for y in b) for x in a)
    backward = max(min(metric(x, y) for x in a) for y in b)
    return max(forward, backward)


def hausdorff_distance(a: HFinite, b: HFinite, ops: OnePointSpace, prec: Optional[int] = None) -> Fraction:
    """Exact d_H, or its evaluation to within 2^-prec through the approximable-real layer."""
    if prec is None:
        return hausdorff(a, b, ops.distance)

    def d(x: Any, y: Any) -> ApproxReal:
        return ApproxReal.const(ops.distance(x, y))

    forward = rsup(rmin(*(d(x, y) for y in b)) for x in a)
    backward = rsup(rmin(*(d(x, y) for x in a)) for y in b)
    return interval_eval(rmax(forward, backward), prec)


def set_distance(p: Any, d: Sequence[Any], ops: OnePointSpace) -> Fraction:
    return min(ops.distance(p, q) for q in d)


@dataclass(frozen=True)
class HyperBall:
    center: HFinite
    radius: Fraction


@dataclass(frozen=True)
class HyperCauchyName:
    """at(n) is within Hausdorff distance 2^-n of the named closed set."""
    at: Callable[[int], HFinite]
    label: str = ""

    @classmethod
    def of(cls, points: HFinite, label: str = "") -> "HyperCauchyName":
        return cls(lambda n: points, label=label)


def hyper_cover(n: int, ops: OnePointSpace) -> List[HyperBall]:
    centers = list(dict.fromkeys(b.center for b in ops.star_cover(n + 1)))
    limit = get_settings().hyper_center_limit
    if len(centers) > limit:
        logger.warning(f"hyper_cover({n}) needs subsets of {len(centers)} centres, limit is {limit}")
        raise BudgetExhausted(f"{len(centers)} star-cover centres exceed the limit {limit}",
                              {"level": n, "centers": len(centers)})
    balls = []
    for size in range(1, len(centers) + 1):
        for subset in combinations(centers, size):
            balls.append(HyperBall(HFinite(subset, ops), dyadic(n)))
    return balls


def combinations_by_size(points: Sequence[Any]) -> Iterator[Tuple[Any, ...]]:
    for size in range(1, len(points) + 1):
        yield from combinations(points, size)


def to_hyper_point(c: CompactName, ops: OnePointSpace) -> HyperCauchyName:
    """
    Search, by size then lexicographically, the centres of C's 2^-(n+2) cover
    for a set within 2^-(n+1) of all of them.
    """
    cache: Dict[int, HFinite] = {}

    def at(n: int) -> HFinite:
        if n in cache:
            return cache[n]
        centers = sorted(dict.fromkeys(b.center for b in c.cover_at(n + 2)), key=ops.index_of)
        target = dyadic(n + 1)
        for candidate in combinations_by_size(centers):
            if hausdorff(candidate, centers, ops.distance) <= target:
                cache[n] = HFinite(candidate, ops)
                logger.debug(f"to_hyper_point({c.label}) at {n}: {cache[n].literal(ops)}")
                return cache[n]
        raise BudgetExhausted(f"No certified finite set at level {n}", {"level": n})

    return HyperCauchyName(at, label=c.label)


def from_hyper_point(p: HyperCauchyName, ops: OnePointSpace) -> ClosedName:
    """
    Positive side: d*(c, at(n)) + 2^-n < r. Negative side: d*(c, at(n)) - 2^-n > r.
    Both dovetailed over (ball, n).
    """

    def probe(ball: Ball, n: int) -> Optional[bool]:
        d = set_distance(ball.center, p.at(n), ops)
        if d + dyadic(n) < ball.radius:
            return True
        if d - dyadic(n) > ball.radius:
            return False
        return None

    def side(wanted: bool) -> Callable[[], Iterator[Optional[Ball]]]:
        def stream() -> Iterator[Optional[Ball]]:
            balls: List[Ball] = []
            source = basic_balls(ops)
            emitted = set()
            for i, n in cantor_pairs():
                while len(balls) <= i:
                    balls.append(next(source))
                ball = balls[i]
                if ball not in emitted and probe(ball, n) is wanted:
                    emitted.add(ball)
                    yield ball
                else:
                    yield None

        return stream

    return ClosedName(positive=side(True), negative=OpenName(side(False)), probe=probe, label=p.label)


def drop_infinity(p: HyperCauchyName, ops: OnePointSpace) -> ClosedName:
    """
    Closed name in the base of C from a name of C ∪ {∞}: only balls certified
    away from ∞ (radius at most h of the centre) are kept, and those are base balls.
    """
    star = from_hyper_point(p, ops)

    def probe(ball: Ball, n: int) -> Optional[bool]:
        if ball.radius > ops.h(ball.center):
            return None
        return star.probe(ball, n)

    def side(wanted: bool) -> Callable[[], Iterator[Optional[Ball]]]:
        def stream() -> Iterator[Optional[Ball]]:
            balls: List[Ball] = []
            source = basic_balls(ops.base)
            emitted = set()
            for i, n in cantor_pairs():
                while len(balls) <= i:
                    balls.append(next(source))
                ball = balls[i]
                if ball not in emitted and probe(ball, n) is wanted:
                    emitted.add(ball)
                    yield ball
                else:
                    yield None

        return stream

    return ClosedName(positive=side(True), negative=OpenName(side(False)), probe=probe, label=f"drop_inf({p.label})")


def _components(balls: List[Ball], space: PolishSpace) -> Tuple[List[List[Ball]], int]:
    parent = list(range(len(balls)))
    checks = 0

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            checks += 1
            if space.ball_gap(balls[i], balls[j]) == 0:
                parent[find(i)] = find(j)
    groups: Dict[int, List[Ball]] = {}
    for i, ball in enumerate(balls):
        groups.setdefault(find(i), []).append(ball)
    return list(groups.values()), checks


def clopen_split_search(k: CompactName, space: PolishSpace, budget: int) -> SplitResult:
    """
    Look for a level whose cover falls into two or more groups at positive
    distance; the first group and the rest then form a clopen split.
    """
    checks = 0
    level = 0
    while checks < budget:
        cover = k.cover_at(level)
        pairs = len(cover) * (len(cover) - 1) // 2
        if checks + pairs > budget:
            break
        groups, used = _components(cover, space)
        checks += used
        if len(groups) >= 2:
            u, v = groups[0], [b for g in groups[1:] for b in g]
            separation = min(space.ball_gap(a, b) for a in u for b in v)
            logger.info(f"clopen split of {k.label} at level {level}, separation {separation}")
            return SplitResult(
                verdict=Verdict.SPLIT,
                level=level,
                u=[_ball_model(b, space) for b in u],
                v=[_ball_model(b, space) for b in v],
                separation=format_rational(separation),
                checks=checks,
            )
        level += 1
    logger.info(f"no clopen split of {k.label} within {budget} checks (reached level {level})")
    return SplitResult(verdict=Verdict.NONE_FOUND, level=level, checks=checks)


def _ball_model(ball: Ball, space: PolishSpace) -> BallModel:
    return BallModel(center=space.format_point(ball.center), radius=format_rational(ball.radius))
