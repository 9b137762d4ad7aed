"""
Computable Polish spaces, effective names and exact ball calculus.

Every shipped instance is exact on special pairs, so distances come back as
Fractions. Generic points are fast Cauchy names over the specials.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import islice
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from app.models.report_models import CheckReport
from app.utils.errors import BudgetExhausted, PreconditionFailed, PromiseViolation, UndecidedAtMargin, UsageError
from app.utils.exactreal import ApproxReal, Comparison, approx_compare, dyadic, format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ball:
    """Open ball around a special point."""
    center: Any
    radius: Fraction

    def __post_init__(self):
        if self.radius <= 0:
            raise PreconditionFailed(f"Ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class CBall:
    """Closed ball around a special point."""
    center: Any
    radius: Fraction

    def __post_init__(self):
        if self.radius <= 0:
            raise PreconditionFailed(f"Ball radius must be positive, got {self.radius}")


AnyBall = Union[Ball, CBall]
Stream = Callable[[], Iterator[Optional[Ball]]]


@dataclass(frozen=True)
class CauchyName:
    """
    Fast Cauchy name: d(at(n), x) < 2^-n.

    ``point`` carries the named special when the name is constant, which
    lets exact instances decide boundary cases.
    """
    at: Callable[[int], Any]
    point: Any = None
    label: str = ""

    @classmethod
    def of(cls, p: Any, label: str = "") -> "CauchyName":
        return cls(lambda n: p, point=p, label=label or str(p))

    def __call__(self, n: int) -> Any:
        return self.at(n)

    @property
    def exact(self) -> bool:
        return self.point is not None


@dataclass(frozen=True)
class OpenName:
    """
    A ticking stream of balls whose union is the named open set.

    Each step yields a ball or None; every consumer gets its own cursor.
    """
    stream: Stream
    label: str = ""

    @classmethod
    def of(cls, balls: Sequence[Ball], label: str = "") -> "OpenName":
        frozen = list(balls)
        return cls(lambda: iter(frozen), label=label)

    def take(self, steps: int) -> List[Ball]:
        seen: List[Ball] = []
        for ball in islice(self.stream(), steps):
            if ball is not None and ball not in seen:
                seen.append(ball)
        return seen


class BallClass(str, Enum):
    MEETS = "MEETS"
    MISSES = "MISSES"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class ClosedName:
    """
    Closed set given by its c.e. side (balls meeting it) and its co-c.e. side
    (an open name of the complement). ``probe`` answers a single ball at a
    given precision when the source can do that directly.
    """
    positive: Optional[Stream] = None
    negative: Optional[OpenName] = None
    probe: Optional[Callable[[Ball, int], Optional[bool]]] = None
    label: str = ""

    @classmethod
    def from_predicate(cls, space: "PolishSpace", meets: Callable[[Ball], bool], label: str = "") -> "ClosedName":
        def positive() -> Iterator[Optional[Ball]]:
            return (b if meets(b) else None for b in basic_balls(space))

        def negative() -> Iterator[Optional[Ball]]:
            return (None if meets(b) else b for b in basic_balls(space))

        return cls(positive=positive, negative=OpenName(negative), probe=lambda b, n: meets(b), label=label)

    def classify_ball(self, ball: Ball, budget: int) -> BallClass:
        if self.probe is not None:
            for n in range(budget):
                answer = self.probe(ball, n)
                if answer is True:
                    return BallClass.MEETS
                if answer is False:
                    return BallClass.MISSES
            return BallClass.UNDECIDED

        pos = self.positive() if self.positive else iter(())
        neg = self.negative.stream() if self.negative else iter(())
        meets = misses = False
        for _ in range(budget):
            meets = meets or next(pos, None) == ball
            misses = misses or next(neg, None) == ball
            if meets and misses:
                logger.error(f"Closed name {self.label} lists {ball} on both sides")
                raise PromiseViolation("Ball listed on both sides of a closed name", {"ball": str(ball)})
            if meets:
                return BallClass.MEETS
            if misses:
                return BallClass.MISSES
        return BallClass.UNDECIDED


@dataclass(frozen=True)
class CompactName:
    """For each n a finite 2^-n cover of the set, each ball meeting it."""
    cover_at: Callable[[int], List[Ball]]
    label: str = ""


@dataclass(frozen=True)
class CoverSystem:
    """
    Levels of finite ball covers with a decidable intersection test
    (open balls vs CBall variants).
    """
    levels: Callable[[int], List[Ball]]
    intersect_decide: Callable[[Sequence[AnyBall]], bool]
    space: "PolishSpace" = field(repr=False, compare=False, default=None)

    @classmethod
    def of(cls, space: "PolishSpace", compact: CompactName) -> "CoverSystem":
        return cls(levels=compact.cover_at, intersect_decide=space.balls_intersect, space=space)

    def restrict(self, center: Any, radius: Fraction) -> CompactName:
        """Compact name of the closed ball B̄(center, radius) inside the covered set."""
        closed = CBall(center, radius)

        def cover_at(n: int) -> List[Ball]:
            return [b for b in self.levels(n) if self.intersect_decide([b, closed])]

        return CompactName(cover_at, label=f"restrict({center}, {format_rational(radius)})")

    def check_refinement(self, n_max: int) -> CheckReport:
        for n in range(n_max):
            parents = self.levels(n)
            for child in self.levels(n + 1):
                if not any(formal_inclusion(child, p, self.space) or self.space.ball_within(child, p) for p in parents):
                    return CheckReport(
                        check="cover_refinement",
                        passed=False,
                        level=n + 1,
                        witness=[self.space.format_point(child.center)],
                        message="level ball not included in any coarser ball",
                    )
        return CheckReport(check="cover_refinement", passed=True, level=n_max)


class PolishSpace(ABC):
    """
    Countable dense sequence of specials with an exact metric.

    Subclasses add the ball calculus the locally compact machinery needs.
    """

    key: str = "space"
    exact: bool = True
    compact: bool = False
    special_count: Optional[int] = None

    @abstractmethod
    def special(self, i: int) -> Any:
        pass

    @abstractmethod
    def index_of(self, p: Any) -> int:
        pass

    @abstractmethod
    def distance(self, a: Any, b: Any) -> Fraction:
        pass

    def metric(self, i: int, j: int, prec: int) -> Fraction:
        return self.distance(self.special(i), self.special(j))

    def metric_real(self, a: Any, b: Any) -> ApproxReal:
        return ApproxReal.const(self.distance(a, b))

    def specials(self, count: int) -> List[Any]:
        if self.special_count is not None:
            count = min(count, self.special_count)
        return [self.special(i) for i in range(count)]

    def has_special(self, i: int) -> bool:
        return self.special_count is None or i < self.special_count

    def contains(self, ball: AnyBall, p: Any) -> bool:
        d = self.distance(ball.center, p)
        return d <= ball.radius if isinstance(ball, CBall) else d < ball.radius

    def parse_point(self, text: str) -> Any:
        raise UsageError(f"{self.key} has no point literals")

    def format_point(self, p: Any) -> str:
        return str(p)

    def ball_specials(self, ball: AnyBall) -> Optional[List[Any]]:
        """All specials inside the ball, or None when there are infinitely many."""
        return None

    def distance_to_ball(self, p: Any, ball: CBall) -> Fraction:
        raise PreconditionFailed(f"{self.key} has no exact ball calculus")

    def covered_by(self, ball: CBall, cover: Sequence[CBall]) -> bool:
        raise PreconditionFailed(f"{self.key} has no exact ball calculus")

    def ball_within(self, inner: Ball, outer: Ball) -> bool:
        return formal_inclusion(inner, outer, self)

    def ball_gap(self, a: Ball, b: Ball) -> Fraction:
        raise PreconditionFailed(f"{self.key} has no exact ball calculus")

    def balls_intersect(self, balls: Sequence[AnyBall]) -> bool:
        raise PreconditionFailed(f"{self.key} has no exact ball calculus")

    def closed_ball_compact_name(self, center: Any, radius: Fraction) -> CompactName:
        raise PreconditionFailed(f"{self.key} closed balls are not computably compact")

    def regular_radius(self, radius: Fraction) -> bool:
        return True

    def neighborhood(self, x: CauchyName) -> Tuple[Ball, CompactName]:
        raise PreconditionFailed(f"{self.key} is not computably locally compact")

    def diameter_bound(self) -> Optional[Fraction]:
        return None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"


# Discrete spaces

_WHOLE = None


class DiscreteSpace(PolishSpace):
    """Countable discrete space, d(x, y) = 1 for x != y."""

    def distance(self, a: Any, b: Any) -> Fraction:
        return Fraction(0) if a == b else Fraction(1)

    def _contents(self, ball: AnyBall) -> Optional[frozenset]:
        singleton = ball.radius < 1 if isinstance(ball, CBall) else ball.radius <= 1
        if singleton:
            return frozenset([ball.center])
        if self.special_count is not None:
            return frozenset(self.specials(self.special_count))
        return _WHOLE

    def ball_specials(self, ball: AnyBall) -> Optional[List[Any]]:
        contents = self._contents(ball)
        if contents is _WHOLE:
            return None
        return sorted(contents, key=self.index_of)

    def distance_to_ball(self, p: Any, ball: CBall) -> Fraction:
        contents = self._contents(ball)
        if contents is _WHOLE or p in contents:
            return Fraction(0)
        return Fraction(1)

    def covered_by(self, ball: CBall, cover: Sequence[CBall]) -> bool:
        contents = self._contents(ball)
        covers = [self._contents(b) for b in cover]
        if any(c is _WHOLE for c in covers):
            return True
        if contents is _WHOLE:
            return False
        union = frozenset().union(*covers) if covers else frozenset()
        return contents <= union

    def ball_within(self, inner: Ball, outer: Ball) -> bool:
        a, b = self._contents(inner), self._contents(outer)
        if b is _WHOLE:
            return True
        return a is not _WHOLE and a <= b

    def ball_gap(self, a: Ball, b: Ball) -> Fraction:
        return Fraction(0) if self.balls_intersect([a, b]) else Fraction(1)

    def balls_intersect(self, balls: Sequence[AnyBall]) -> bool:
        common = _WHOLE
        for ball in balls:
            contents = self._contents(ball)
            if contents is _WHOLE:
                continue
            common = contents if common is _WHOLE else common & contents
            if not common:
                return False
        return True

    def closed_ball_compact_name(self, center: Any, radius: Fraction) -> CompactName:
        contents = self._contents(CBall(center, radius))
        if contents is _WHOLE:
            raise PreconditionFailed(f"Closed ball of radius {radius} in {self.key} is not compact")
        points = sorted(contents, key=self.index_of)
        return CompactName(lambda n: [Ball(p, dyadic(n)) for p in points], label=f"{self.key}:{points}")

    def regular_radius(self, radius: Fraction) -> bool:
        return radius != 1

    def neighborhood(self, x: CauchyName) -> Tuple[Ball, CompactName]:
        p = x.at(2)
        return Ball(p, Fraction(1, 2)), self.closed_ball_compact_name(p, Fraction(1, 2))

    def diameter_bound(self) -> Optional[Fraction]:
        if self.special_count is not None and self.special_count <= 1:
            return Fraction(0)
        return Fraction(1)

    def parse_point(self, text: str) -> Any:
        try:
            p = int(text)
        except ValueError as e:
            raise UsageError(f"{self.key} points are integers, got {text!r}") from e
        self.index_of(p)
        return p


class DiscreteIntegers(DiscreteSpace):
    """ℤ with the discrete metric, enumerated 0, 1, -1, 2, -2, ..."""

    key = "discrete-z"

    def special(self, i: int) -> int:
        return (i + 1) // 2 if i % 2 else -(i // 2)

    def index_of(self, p: int) -> int:
        if p > 0:
            return 2 * p - 1
        return -2 * p


class FiniteDiscreteSpace(DiscreteSpace):
    """{0, ..., size-1} with the discrete metric."""

    compact = True

    def __init__(self, size: int):
        if size < 1:
            raise PreconditionFailed("A finite space needs at least one point")
        self.special_count = size
        self.key = f"finite-{size}"

    def special(self, i: int) -> int:
        if not 0 <= i < self.special_count:
            raise PreconditionFailed(f"{self.key} has no special {i}")
        return i

    def index_of(self, p: int) -> int:
        if not 0 <= p < self.special_count:
            raise UsageError(f"{p} is not a point of {self.key}")
        return p


# Reals


def calkin_wilf(k: int) -> Fraction:
    """k-th positive rational (k >= 1) in breadth-first Calkin-Wilf order."""
    a, b = 1, 1
    for bit in bin(k)[3:]:
        if bit == "0":
            a, b = a, a + b
        else:
            a, b = a + b, b
    return Fraction(a, b)


def calkin_wilf_index(q: Fraction) -> int:
    a, b = q.numerator, q.denominator
    bits = []
    while (a, b) != (1, 1):
        if a < b:
            bits.append("0")
            b = b - a
        else:
            bits.append("1")
            a = a - b
    return int("1" + "".join(reversed(bits)), 2)


class Reals(PolishSpace):
    """ℝ with |x - y|; specials are 0, q1, -q1, q2, -q2, ..."""

    key = "reals"

    def special(self, i: int) -> Fraction:
        if i == 0:
            return Fraction(0)
        q = calkin_wilf((i + 1) // 2)
        return q if i % 2 else -q

    def index_of(self, p: Fraction) -> int:
        p = Fraction(p)
        if p == 0:
            return 0
        k = calkin_wilf_index(abs(p))
        return 2 * k - 1 if p > 0 else 2 * k

    def distance(self, a: Fraction, b: Fraction) -> Fraction:
        return abs(Fraction(a) - Fraction(b))

    def parse_point(self, text: str) -> Fraction:
        return parse_rational(text)

    def format_point(self, p: Fraction) -> str:
        return format_rational(p)

    def distance_to_ball(self, p: Fraction, ball: CBall) -> Fraction:
        return max(Fraction(0), abs(p - ball.center) - ball.radius)

    def covered_by(self, ball: CBall, cover: Sequence[CBall]) -> bool:
        lo, hi = ball.center - ball.radius, ball.center + ball.radius
        intervals = [(b.center - b.radius, b.center + b.radius) for b in cover]
        cur = lo
        while True:
            reach = [right for left, right in intervals if left <= cur]
            if not reach:
                return False
            best = max(reach)
            if best >= hi:
                return True
            if best <= cur:
                return False
            cur = best

    def ball_within(self, inner: Ball, outer: Ball) -> bool:
        return (outer.center - outer.radius <= inner.center - inner.radius
                and inner.center + inner.radius <= outer.center + outer.radius)

    def ball_gap(self, a: Ball, b: Ball) -> Fraction:
        return max(Fraction(0), abs(a.center - b.center) - a.radius - b.radius)

    def balls_intersect(self, balls: Sequence[AnyBall]) -> bool:
        if not balls:
            return True
        lo = max(b.center - b.radius for b in balls)
        hi = min(b.center + b.radius for b in balls)
        if lo < hi:
            return True
        if lo > hi:
            return False
        lo_open = any(isinstance(b, Ball) and b.center - b.radius == lo for b in balls)
        hi_open = any(isinstance(b, Ball) and b.center + b.radius == hi for b in balls)
        return not (lo_open or hi_open)

    def closed_ball_compact_name(self, center: Fraction, radius: Fraction) -> CompactName:
        lo, hi = center - radius, center + radius

        def cover_at(n: int) -> List[Ball]:
            step = dyadic(n + 1)
            points = []
            p = lo
            while p < hi:
                points.append(p)
                p += step
            points.append(hi)
            return [Ball(q, dyadic(n)) for q in points]

        return CompactName(cover_at, label=f"[{format_rational(lo)}, {format_rational(hi)}]")

    def neighborhood(self, x: CauchyName) -> Tuple[Ball, CompactName]:
        p = Fraction(x.at(3))
        return Ball(p, Fraction(1)), self.closed_ball_compact_name(p, Fraction(1))


# Dyadic integers


def valuation2(n: int) -> int:
    return (n & -n).bit_length() - 1


def _open_depth(radius: Fraction) -> int:
    # smallest k >= 0 with 2^-k < radius
    k = 0
    while dyadic(k) >= radius:
        k += 1
    return k


def _closed_depth(radius: Fraction) -> int:
    k = 0
    while dyadic(k) > radius:
        k += 1
    return k


class DyadicIntegers(PolishSpace):
    """
    ℤ₂ with d(a, b) = 2^-v(a-b). Specials are the naturals; literals are
    LSB-first digit strings. Balls are cylinders (residue, depth).
    """

    key = "z2"
    compact = True

    def special(self, i: int) -> int:
        return i

    def index_of(self, p: int) -> int:
        if p < 0:
            raise UsageError(f"z2 specials are naturals, got {p}")
        return p

    def distance(self, a: int, b: int) -> Fraction:
        if a == b:
            return Fraction(0)
        return dyadic(valuation2(a - b))

    def parse_point(self, text: str) -> int:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise UsageError(f"z2 literals are LSB-first binary digit strings, got {text!r}")
        return int(text[::-1], 2)

    def format_point(self, p: int) -> str:
        return bin(p)[2:][::-1] if p else "0"

    def cylinder(self, ball: AnyBall) -> Tuple[int, int]:
        depth = _closed_depth(ball.radius) if isinstance(ball, CBall) else _open_depth(ball.radius)
        return ball.center % (2 ** depth), depth

    def distance_to_ball(self, p: int, ball: CBall) -> Fraction:
        residue, depth = self.cylinder(ball)
        if (p - residue) % (2 ** depth) == 0:
            return Fraction(0)
        return self.distance(p, residue)

    def _cylinder_covered(self, residue: int, depth: int, cover: List[Tuple[int, int]]) -> bool:
        if any(d <= depth and (residue - r) % (2 ** d) == 0 for r, d in cover):
            return True
        finer = [(r, d) for r, d in cover if d > depth and (r - residue) % (2 ** depth) == 0]
        if not finer:
            return False
        return (self._cylinder_covered(residue, depth + 1, finer)
                and self._cylinder_covered(residue + 2 ** depth, depth + 1, finer))

    def covered_by(self, ball: CBall, cover: Sequence[CBall]) -> bool:
        residue, depth = self.cylinder(ball)
        return self._cylinder_covered(residue, depth, [self.cylinder(b) for b in cover])

    def ball_within(self, inner: Ball, outer: Ball) -> bool:
        r1, k1 = self.cylinder(inner)
        r2, k2 = self.cylinder(outer)
        return k1 >= k2 and (r1 - r2) % (2 ** k2) == 0

    def ball_gap(self, a: Ball, b: Ball) -> Fraction:
        if self.balls_intersect([a, b]):
            return Fraction(0)
        return self.distance(a.center, b.center)

    def balls_intersect(self, balls: Sequence[AnyBall]) -> bool:
        cylinders = [self.cylinder(b) for b in balls]
        for i, (r1, k1) in enumerate(cylinders):
            for r2, k2 in cylinders[i + 1:]:
                if (r1 - r2) % (2 ** min(k1, k2)):
                    return False
        return True

    def ball_specials(self, ball: AnyBall) -> Optional[List[Any]]:
        return None

    def closed_ball_compact_name(self, center: int, radius: Fraction) -> CompactName:
        depth = _closed_depth(radius)
        base = center % (2 ** depth)

        def cover_at(n: int) -> List[Ball]:
            if n + 1 <= depth:
                return [Ball(base, dyadic(n))]
            return [Ball(base + t * 2 ** depth, dyadic(n)) for t in range(2 ** (n + 1 - depth))]

        return CompactName(cover_at, label=f"cylinder({base}, {depth})")

    def regular_radius(self, radius: Fraction) -> bool:
        return _open_depth(radius) == _closed_depth(radius)

    def neighborhood(self, x: CauchyName) -> Tuple[Ball, CompactName]:
        p = x.at(1)
        return Ball(p % 2, Fraction(3, 2)), self.closed_ball_compact_name(0, Fraction(1))

    def diameter_bound(self) -> Optional[Fraction]:
        return Fraction(1)


# Dovetailing


def cantor_pairs() -> Iterator[Tuple[int, int]]:
    s = 0
    while True:
        for i in range(s + 1):
            yield i, s - i
        s += 1


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def tuples_by_sum(arity: int) -> Iterator[Tuple[int, ...]]:
    """All natural tuples of the given arity, by increasing sum, lexicographic within a sum."""
    s = 0
    while True:
        yield from _compositions(s, arity)
        s += 1


def basic_balls(space: PolishSpace) -> Iterator[Ball]:
    """B(s_i, 2^-j) in Cantor order over (i, j)."""
    for i, j in cantor_pairs():
        if space.has_special(i):
            yield Ball(space.special(i), dyadic(j))


# Operations


class Membership(str, Enum):
    CONFIRMED = "CONFIRMED"
    REFUTED = "REFUTED"


def formal_inclusion(inner: Ball, outer: Ball, space: PolishSpace, margin: Optional[Fraction] = None) -> bool:
    """d(a, b) + r < q: the closed inner ball lies inside the open outer ball."""
    if space.exact:
        return space.distance(inner.center, outer.center) + inner.radius < outer.radius
    if margin is None:
        raise PreconditionFailed(f"{space.key} is not exact; formal inclusion needs a margin")
    lhs = space.metric_real(inner.center, outer.center) + inner.radius
    verdict = approx_compare(lhs, ApproxReal.const(outer.radius), margin)
    if verdict == Comparison.WITHIN_MARGIN:
        raise UndecidedAtMargin("Formal inclusion within margin", {"inner": str(inner), "outer": str(outer)})
    return verdict == Comparison.LESS


def ball_member(x: CauchyName, ball: Ball, space: PolishSpace, budget: int = 64) -> Membership:
    for n in range(budget):
        d = space.distance(x.at(n), ball.center)
        err = Fraction(0) if x.exact else dyadic(n)
        if d + err < ball.radius:
            return Membership.CONFIRMED
        if d - err > ball.radius:
            return Membership.REFUTED
    logger.warning(f"ball_member undecided for {x.label or 'name'} in {ball} after {budget} steps")
    raise BudgetExhausted("Membership not decided within budget", {"ball": str(ball), "budget": budget})


def metric_between_names(x: CauchyName, y: CauchyName, prec: int, space: PolishSpace) -> Fraction:
    if x.exact and y.exact:
        return space.distance(x.point, y.point)
    return space.distance(x.at(prec + 1), y.at(prec + 1))


def certified_inside(space: PolishSpace, x: CauchyName, ball: Ball, tries: int) -> bool:
    if x.exact:
        return space.contains(ball, x.point)
    for m in range(tries):
        if space.distance(x.at(m), ball.center) + dyadic(m) < ball.radius:
            return True
    return False


def validate_compact_name(k: CompactName, n_max: int, probes: Sequence[CauchyName], space: PolishSpace) -> CheckReport:
    for n in range(n_max + 1):
        cover = k.cover_at(n)
        for ball in cover:
            if ball.radius > dyadic(n):
                logger.error(f"Compact name {k.label} has radius {ball.radius} at level {n}")
                raise PromiseViolation(f"Cover ball radius exceeds 2^-{n}", {"level": n, "ball": str(ball)})
        for probe in probes:
            if not any(certified_inside(space, probe, b, n + 16) for b in cover):
                logger.error(f"Compact name {k.label} misses probe {probe.label} at level {n}")
                raise PromiseViolation(
                    f"Probe not covered at level {n}",
                    {"level": n, "probe": probe.label},
                )
    return CheckReport(check="compact_name", passed=True, level=n_max, message=f"{len(probes)} probes covered")


def membership_stream(space: PolishSpace, x: CauchyName, probe_budget: int = 8) -> OpenName:
    """Balls certified to contain x, dovetailed over basic balls."""

    def stream() -> Iterator[Optional[Ball]]:
        for ball in basic_balls(space):
            try:
                verdict = ball_member(x, ball, space, probe_budget)
            except BudgetExhausted:
                verdict = None
            yield ball if verdict == Membership.CONFIRMED else None

    return OpenName(stream, label=f"member({x.label})")


def name_from_membership(space: PolishSpace, members: OpenName, steps: int = 100000) -> CauchyName:
    cache: Dict[int, Any] = {}

    def at(n: int) -> Any:
        if n not in cache:
            for ball in islice(members.stream(), steps):
                if ball is not None and ball.radius <= dyadic(n):
                    cache[n] = ball.center
                    break
            else:
                raise BudgetExhausted(f"No member ball of radius 2^-{n} within {steps} steps")
        return cache[n]

    return CauchyName(at, label=f"rebuilt({members.label})")


def check_metric_axioms(space: PolishSpace, count: int = 20) -> CheckReport:
    points = space.specials(count)
    fmt = space.format_point
    for a in points:
        if space.distance(a, a) != 0:
            return CheckReport(check="metric_axioms", passed=False, witness=[fmt(a)], message="identity")
        for b in points:
            if space.distance(a, b) != space.distance(b, a):
                return CheckReport(check="metric_axioms", passed=False, witness=[fmt(a), fmt(b)], message="symmetry")
            if a != b and space.distance(a, b) == 0:
                return CheckReport(check="metric_axioms", passed=False, witness=[fmt(a), fmt(b)], message="separation")
            for c in points:
                if space.distance(a, c) > space.distance(a, b) + space.distance(b, c):
                    return CheckReport(
                        check="metric_axioms", passed=False, witness=[fmt(a), fmt(b), fmt(c)], message="triangle"
                    )
    return CheckReport(check="metric_axioms", passed=True, details={"specials": len(points)})
