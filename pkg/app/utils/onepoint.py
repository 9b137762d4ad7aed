"""
One-point compactification M* = M ∪ {∞} of a non-compact locally compact
space, metrized by

    d*(x, y) = min(ρ(x, y), h(x) + h(y)),   d*(x, ∞) = h(x),

where h(x) = sup_i (c_i - ρ(x, K_i)) over the strong σ-sequence.
"""
import logging
import threading
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from app.utils.errors import BudgetExhausted, IsInfinity, PreconditionFailed, PromiseViolation
from app.utils.exactreal import ApproxReal, Comparison, approx_compare, dyadic
from app.utils.locally_compact import SigmaSequence, sigma_sequence
from app.utils.space import AnyBall, Ball, CauchyName, CBall, CompactName, PolishSpace, metric_between_names

logger = logging.getLogger(__name__)


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
INFINITY_LITERAL = "inf"


class OnePointSpace(PolishSpace):
    """
    M* as a computable Polish space: ∞ is special 0 and x_k is special k+1.
    The star metric is exact on special pairs.
    """

    compact = True

    def __init__(self, base: PolishSpace, ssq: Optional[SigmaSequence] = None):
        if base.compact:
            logger.error(f"Refusing to compactify compact space {base.key}")
            raise PromiseViolation(f"{base.key} is compact; the one-point compactification needs a non-compact base",
                                   {"instance": base.key})
        self.base = base
        self.ssq = ssq or sigma_sequence(base)
        self.key = f"{base.key}*"
        self.special_count = None if base.special_count is None else base.special_count + 1
        self._h: Dict[Any, Fraction] = {}
        self._lock = threading.Lock()

    def special(self, i: int) -> Any:
        return INFINITY if i == 0 else self.base.special(i - 1)

    def index_of(self, p: Any) -> int:
        return 0 if p is INFINITY else self.base.index_of(p) + 1

    def parse_point(self, text: str) -> Any:
        if text.strip() == INFINITY_LITERAL:
            return INFINITY
        return self.base.parse_point(text)

    def format_point(self, p: Any) -> str:
        return INFINITY_LITERAL if p is INFINITY else self.base.format_point(p)

    def h(self, p: Any) -> Fraction:
        """Exact h on a special of the base: a finite sup up to the locate level."""
        if p is INFINITY:
            raise IsInfinity("h is not defined at ∞")
        cached = self._h.get(p)
        if cached is not None:
            return cached
        level, _ = self.ssq.locate_special(p)
        value = max(self.ssq.c(i) - self.ssq.dist(p, i) for i in range(level + 1))
        with self._lock:
            self._h[p] = value
        return value

    def h_name(self, x: CauchyName, prec: int) -> Fraction:
        # h is 1-Lipschitz for ρ
        if x.exact:
            return self.h(x.point)
        return self.h(x.at(prec + 1))

    def h_real(self, x: CauchyName) -> ApproxReal:
        return ApproxReal(lambda prec: self.h_name(x, prec), label=f"h({x.label})")

    def distance(self, p: Any, q: Any) -> Fraction:
        if p is INFINITY and q is INFINITY:
            return Fraction(0)
        if p is INFINITY:
            return self.h(q)
        if q is INFINITY:
            return self.h(p)
        if p == q:
            return Fraction(0)
        return min(self.base.distance(p, q), self.h(p) + self.h(q))

    def star_distance(self, p: CauchyName, q: CauchyName, prec: int) -> Fraction:
        return metric_between_names(p, q, prec, self)

    def star_real(self, p: CauchyName, q: CauchyName) -> ApproxReal:
        return ApproxReal(lambda prec: self.star_distance(p, q, prec), label=f"d*({p.label}, {q.label})")

    def ball_specials(self, ball: AnyBall) -> Optional[List[Any]]:
        # below h(centre) a star ball is the base ball
        if ball.center is INFINITY:
            return None
        h = self.h(ball.center)
        if ball.radius < h or (isinstance(ball, Ball) and ball.radius == h):
            return self.base.ball_specials(ball)
        return None

    def star_cover(self, n: int) -> List[Ball]:
        """B(∞, c_n) plus a 2^-n cover of K_{n+1}, which contains K_0, ..., K_n."""
        cover = [Ball(INFINITY, self.ssq.c(n))]
        cover.extend(self.ssq.compact_name(n + 1).cover_at(n))
        logger.debug(f"star_cover({n}) of {self.key}: {len(cover)} balls")
        return cover

    def covers(self, cover: Sequence[Ball], p: Any) -> bool:
        for ball in cover:
            if ball.center is not INFINITY and p is not INFINITY:
                if self.base.distance(ball.center, p) < ball.radius:
                    return True
            if self.distance(ball.center, p) < ball.radius:
                return True
        return False

    def embed(self, x: CauchyName) -> CauchyName:
        # d* ≤ ρ, so a ρ-fast name is d*-fast
        return CauchyName(x.at, point=x.point, label=x.label)

    def infinity_name(self) -> CauchyName:
        return CauchyName.of(INFINITY, label=INFINITY_LITERAL)

    def unembed(self, p: CauchyName, budget: int = 64) -> CauchyName:
        """
        Inverse of embed away from ∞: find n with d*(p, ∞) > c_n, so the point
        lies in K_{n+1} where d* and ρ agree below c_n.
        """
        if p.point is INFINITY:
            raise IsInfinity("Cannot unembed ∞", {"instance": self.key})
        if p.exact:
            return CauchyName.of(p.point, label=p.label)
        to_infinity = self.star_real(p, self.infinity_name())
        for n in range(budget):
            c = self.ssq.c(n)
            if approx_compare(to_infinity, ApproxReal.const(c), c / 4) == Comparison.GREATER:
                k0 = 0
                while dyadic(k0) > c:
                    k0 += 1
                logger.debug(f"unembed: {p.label} separated from ∞ at level {n}")
                return CauchyName(lambda m: p.at(max(m, k0)), label=f"unembed({p.label})")
        logger.warning(f"unembed could not separate {p.label} from ∞ in {budget} levels")
        raise BudgetExhausted("Separation from ∞ not certified", {"point": p.label, "budget": budget})

    def compact_name_of_closed(self, contains: Callable[[Any], bool], label: str = "") -> CompactName:
        """
        Compact name of C ∪ {∞} for a decidable C in a base whose K_n have
        finitely many specials.
        """

        def cover_at(m: int) -> List[Ball]:
            specials = self.ssq.level_specials(m + 1)
            if specials is None:
                raise PreconditionFailed(f"K_{m + 1} of {self.base.key} has infinitely many specials")
            return [Ball(INFINITY, self.ssq.c(m))] + [Ball(x, dyadic(m)) for x in specials if contains(x)]

        return CompactName(cover_at, label=label or "closed ∪ {inf}")

    def compact_name_of_finite(self, points: Sequence[Any]) -> CompactName:
        frozen = sorted(set(points), key=self.index_of)
        return CompactName(lambda m: [Ball(p, dyadic(m)) for p in frozen],
                           label="{" + ", ".join(self.format_point(p) for p in frozen) + "}")


def compactify(base: PolishSpace, ssq: Optional[SigmaSequence] = None) -> OnePointSpace:
    return OnePointSpace(base, ssq)
