"""
The Chabauty space S(G) as an effectively closed subset of K(G*): counterwitness
triples, the refuter, the complement enumeration and the embedding
C ↦ C ∪ {∞} of closed subgroups.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from app.models.report_models import BallModel, CounterwitnessModel, RefutationReason, RefutationResult, Verdict
from app.utils.errors import BudgetExhausted, PreconditionFailed
from app.utils.exactreal import dyadic, format_rational
from app.utils.groups import ComputableGroup
from app.utils.hyperspace import HFinite, HyperBall, HyperCauchyName, hausdorff, set_distance
from app.utils.onepoint import INFINITY, OnePointSpace
from app.utils.space import Ball, BallClass, ClosedName, tuples_by_sum

logger = logging.getLogger(__name__)

EXHAUSTIVE = "EXHAUSTIVE"
LIPSCHITZ = "LIPSCHITZ"


@dataclass(frozen=True)
class CounterwitnessTriple:
    """Balls B, D, V away from ∞ with g(B, D) ⊆ V for g(x, y) = x·y⁻¹."""
    b: Ball
    d: Ball
    v: Ball
    certificate: str
    margin: Fraction
    j: int
    k: int

    def to_model(self, ops: OnePointSpace) -> CounterwitnessModel:
        return CounterwitnessModel(
            b=_ball_model(self.b, ops),
            d=_ball_model(self.d, ops),
            v=_ball_model(self.v, ops),
            certificate=self.certificate,
            margin=format_rational(self.margin),
        )


def _ball_model(ball: Ball, ops: OnePointSpace) -> BallModel:
    return BallModel(center=ops.format_point(ball.center), radius=format_rational(ball.radius))


def _check_pair(g: ComputableGroup, ops: OnePointSpace) -> None:
    if ops.base is not g.space and ops.base.key != g.space.key:
        raise PreconditionFailed(f"{ops.key} is not the compactification of {g.key}")


def certify_triple(g: ComputableGroup, ops: OnePointSpace, b: Ball, d: Ball, v: Ball) -> Optional[Tuple[str, Fraction]]:
    """
    Exhaustive when B and D hold finitely many specials, otherwise the
    Lipschitz bound d(g(x, y), g(c_B, c_D)) < r_B + r_D.
    """
    base = g.space
    left, right = ops.ball_specials(b), ops.ball_specials(d)
    if left is not None and right is not None:
        slack = None
        for x in left:
            for y in right:
                gap = v.radius - base.distance(v.center, g.subtract(x, y))
                if gap <= 0:
                    return None
                slack = gap if slack is None else min(slack, gap)
        return EXHAUSTIVE, slack
    margin = v.radius - base.distance(v.center, g.subtract(b.center, d.center)) - b.radius - d.radius
    if margin > 0:
        return LIPSCHITZ, margin
    return None


def enumerate_counterwitnesses(g: ComputableGroup, ops: OnePointSpace) -> Iterator[Optional[CounterwitnessTriple]]:
    """
    Ticking stream over tuples (i_B, i_D, i_V, j, k) by increasing sum. Centres
    are specials of M* other than ∞ and every radius sits below h of its centre.
    """
    _check_pair(g, ops)
    for ib, id_, iv, j, k in tuples_by_sum(5):
        if 0 in (ib, id_, iv) or not all(ops.has_special(i) for i in (ib, id_, iv)):
            yield None
            continue
        cb, cd, cv = ops.special(ib), ops.special(id_), ops.special(iv)
        rb, rv = dyadic(j), dyadic(k)
        if rb >= ops.h(cb) or rb >= ops.h(cd) or rv >= ops.h(cv):
            yield None
            continue
        b, d, v = Ball(cb, rb), Ball(cd, rb), Ball(cv, rv)
        certified = certify_triple(g, ops, b, d, v)
        if certified is None:
            yield None
            continue
        certificate, margin = certified
        yield CounterwitnessTriple(b, d, v, certificate, margin, j, k)


def triple_conditions(triple: CounterwitnessTriple, points: HFinite, n: int, ops: OnePointSpace) -> Optional[Dict[str, Fraction]]:
    """
    Margins of (1) B meets K, (2) D meets K and (3) K misses the closed V,
    read off a finite set within 2^-n of K. None unless all three hold.
    """
    err = dyadic(n)
    meets_b = triple.b.radius - set_distance(triple.b.center, points, ops) - err
    meets_d = triple.d.radius - set_distance(triple.d.center, points, ops) - err
    misses_v = set_distance(triple.v.center, points, ops) - err - triple.v.radius
    if meets_b > 0 and meets_d > 0 and misses_v > 0:
        return {"b": meets_b, "d": meets_d, "v": misses_v}
    return None


def refute_subgroup(k: HyperCauchyName, g: ComputableGroup, ops: OnePointSpace, budget: int,
                    trace: Optional[List[Dict[str, Any]]] = None) -> RefutationResult:
    """
    Round robin over three channels: counterwitness triples, separation
    from ∞ and separation from the identity. NOT_REFUTED only means the
    budget ran out.
    """
    _check_pair(g, ops)
    triples = enumerate_counterwitnesses(g, ops)
    cache: Dict[int, HFinite] = {}

    def at(n: int) -> HFinite:
        if n not in cache:
            cache[n] = k.at(n)
        return cache[n]

    for step in range(budget):
        channel = step % 3
        if channel == 0:
            triple = next(triples)
            if triple is None:
                continue
            n = max(triple.j, triple.k) + 2
            margins = triple_conditions(triple, at(n), n, ops)
            if trace is not None:
                trace.append({
                    "step": step,
                    "triple": triple.to_model(ops).model_dump(),
                    "precision": n,
                    "margins": {key: format_rational(m) for key, m in (margins or {}).items()},
                })
            if margins is not None:
                logger.info(f"{k.label} refuted by a counterwitness triple at step {step}")
                return RefutationResult(
                    verdict=Verdict.REFUTED, reason=RefutationReason.TRIPLE, triple=triple.to_model(ops),
                    precision=n, margins={key: format_rational(m) for key, m in margins.items()}, steps=step + 1,
                )
            continue
        t = (step // 3).bit_length()
        target = INFINITY if channel == 1 else g.identity
        margin = set_distance(target, at(t), ops) - dyadic(t)
        if margin > 0:
            reason = RefutationReason.MISSING_INFINITY if channel == 1 else RefutationReason.MISSING_IDENTITY
            name = "infinity" if channel == 1 else "identity"
            logger.info(f"{k.label} refuted: {name} at distance above {format_rational(margin)}")
            return RefutationResult(verdict=Verdict.REFUTED, reason=reason, precision=t,
                                    margins={name: format_rational(margin)}, steps=step + 1)
    logger.info(f"{k.label} not refuted within {budget} steps")
    return RefutationResult(verdict=Verdict.NOT_REFUTED, steps=budget)


def subset_from_mask(mask: int, ops: OnePointSpace) -> Optional[HFinite]:
    """Specials of M* whose index bits are set in the mask."""
    indices = [i for i in range(mask.bit_length()) if mask >> i & 1]
    if not indices or not all(ops.has_special(i) for i in indices):
        return None
    return HFinite((ops.special(i) for i in indices), ops)


@dataclass(frozen=True)
class ComplementBall:
    ball: HyperBall
    reason: str


class ChabautyComplementName:
    """
    c.e. open name of the non-subgroups in K(G*): hyperspace balls around
    finite sets that certifiably satisfy a counterwitness triple or miss ∞
    or the identity.
    """

    def __init__(self, g: ComputableGroup, ops: OnePointSpace):
        _check_pair(g, ops)
        self.g = g
        self.ops = ops

    def _separation_reason(self, points: HFinite, m: int) -> Optional[str]:
        err = dyadic(m)
        if set_distance(INFINITY, points, self.ops) - err > 0:
            return RefutationReason.MISSING_INFINITY.value
        if set_distance(self.g.identity, points, self.ops) - err > 0:
            return RefutationReason.MISSING_IDENTITY.value
        return None

    def stream(self) -> Iterator[Optional[ComplementBall]]:
        triples: List[CounterwitnessTriple] = []
        source = enumerate_counterwitnesses(self.g, self.ops)
        emitted = set()
        for a, t, m in tuples_by_sum(3):
            points = subset_from_mask(t + 1, self.ops)
            if points is None:
                yield None
                continue
            reason = None
            if a == 0:
                reason = self._separation_reason(points, m)
            else:
                while len(triples) < a:
                    found = next(source)
                    if found is not None:
                        triples.append(found)
                    else:
                        yield None
                if triple_conditions(triples[a - 1], points, m, self.ops) is not None:
                    reason = RefutationReason.TRIPLE.value
            ball = HyperBall(points, dyadic(m))
            if reason is None or ball in emitted:
                yield None
                continue
            emitted.add(ball)
            yield ComplementBall(ball, reason)

    def take(self, steps: int) -> List[ComplementBall]:
        out = []
        for item, _ in zip(self.stream(), range(steps)):
            if item is not None:
                out.append(item)
        return out

    def contains_ball(self, points: HFinite, m: int, budget: int) -> Optional[str]:
        """Reason the ball B_H(points, 2^-m) lies in the complement, searching triples within budget."""
        reason = self._separation_reason(points, m)
        if reason is not None:
            return reason
        source = enumerate_counterwitnesses(self.g, self.ops)
        for _ in range(budget):
            triple = next(source)
            if triple is not None and triple_conditions(triple, points, m, self.ops) is not None:
                logger.debug(f"complement ball around {points.literal(self.ops)} via {triple}")
                return RefutationReason.TRIPLE.value
        return None


def complement_name(g: ComputableGroup, ops: OnePointSpace) -> ChabautyComplementName:
    return ChabautyComplementName(g, ops)


def embed_closed_subgroup(c: ClosedName, g: ComputableGroup, ops: OnePointSpace, budget: int = 64) -> HyperCauchyName:
    """
    at(n) is ∞ together with the centres of the level n+2 cover of K_{n+2}
    that meet the subgroup; the part of H outside K_{n+2} is star-close to ∞.
    """
    _check_pair(g, ops)
    cache: Dict[int, HFinite] = {}

    def at(n: int) -> HFinite:
        if n in cache:
            return cache[n]
        points = [INFINITY]
        for ball in ops.ssq.compact_name(n + 2).cover_at(n + 2):
            verdict = c.classify_ball(ball, budget)
            if verdict == BallClass.UNDECIDED:
                logger.warning(f"embed: {ball} undecided for {c.label} after {budget} steps")
                raise BudgetExhausted("Cover ball not classified", {"ball": str(ball), "level": n})
            if verdict == BallClass.MEETS:
                points.append(ball.center)
        cache[n] = HFinite(points, ops)
        return cache[n]

    return HyperCauchyName(at, label=f"{c.label or 'H'} ∪ {{inf}}")


def find_complement_ball(name: ChabautyComplementName, point: HyperCauchyName, steps: int) -> Optional[ComplementBall]:
    """
    First of the first `steps` complement balls certified to contain the
    point. None means the point passed the audit at that budget.
    """
    for item in name.take(steps):
        m = _radius_level(item.ball.radius)
        n = m + 1
        if hausdorff(item.ball.center, point.at(n), name.ops.distance) + dyadic(n) < item.ball.radius:
            return item
    return None


def _radius_level(radius: Fraction) -> int:
    m = 0
    while dyadic(m) > radius:
        m += 1
    return m
