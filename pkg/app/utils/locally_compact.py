"""
Local compactness structures, strong σ-compactness data and the proper
remetrization built from it.
"""
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Any, Callable, Dict, List, Optional, Tuple

from app.config import get_settings
from app.models.report_models import BoundedResult, CheckReport, DeltaBallResult, Verdict
from app.utils.errors import BudgetExhausted, PreconditionFailed, PromiseViolation
from app.utils.exactreal import dyadic, format_rational
from app.utils.space import (
    Ball, CauchyName, CBall, CompactName, CoverSystem, DiscreteSpace, PolishSpace, Reals,
    cantor_pairs, certified_inside, formal_inclusion,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocallyCompactStructure:
    """x ↦ (B, K) with x ∈ B and the closed content of B inside K."""
    space: PolishSpace
    neighborhood: Callable[[CauchyName], Tuple[Ball, CompactName]]

    @classmethod
    def canonical(cls, space: PolishSpace) -> "LocallyCompactStructure":
        return cls(space, space.neighborhood)


@dataclass(frozen=True)
class ClosedBallNeighborhood:
    center: Any
    radius: Fraction
    compact: CompactName

    @property
    def cball(self) -> CBall:
        return CBall(self.center, self.radius)


def closed_ball_neighborhood(x: CauchyName, lcs: LocallyCompactStructure, space: PolishSpace,
                             budget: int = 100000) -> ClosedBallNeighborhood:
    """
    Search a ball B(ξ, r) around x whose closed ball is the closure of the
    open one and sits formally inside the structure's neighbourhood.
    """
    ball, k_name = lcs.neighborhood(x)
    cover = CoverSystem.of(space, k_name)
    for step, (i, k) in enumerate(cantor_pairs()):
        if step >= budget:
            break
        if not space.has_special(i):
            continue
        xi = space.special(i)
        r = ball.radius / 2 ** (k + 1)
        candidate = Ball(xi, r)
        if (space.regular_radius(r)
                and formal_inclusion(candidate, ball, space)
                and certified_inside(space, x, candidate, i + k + 4)):
            logger.debug(f"closed ball neighbourhood of {x.label}: ({xi}, {r}) after {step} steps")
            return ClosedBallNeighborhood(xi, r, cover.restrict(xi, r))
    logger.warning(f"closed_ball_neighborhood gave up on {x.label} after {budget} steps")
    raise BudgetExhausted("No formally included closed ball found", {"point": x.label, "budget": budget})


class SigmaSequence:
    """
    Nested compact sets K_n, each a finite union of closed balls, with margins
    c_n such that K_{n+1} contains the c_n-neighbourhood of K_n.
    """

    def __init__(self, space: PolishSpace, lcs: Optional[LocallyCompactStructure] = None, method: str = "canonical"):
        self.space = space
        self.lcs = lcs or LocallyCompactStructure.canonical(space)
        self.method = method
        self._levels: List[List[CBall]] = []
        self._margins: List[Fraction] = []
        self._neighborhoods: Dict[Any, CBall] = {}
        self._lock = threading.Lock()
        if method not in ("canonical", "dovetail"):
            raise PreconditionFailed(f"Unknown σ-sequence method {method!r}")

    # Canonical closed forms

    def _canonical_level(self, n: int) -> List[CBall]:
        space = self.space
        if space.compact:
            return [CBall(space.special(0), Fraction(1))]
        if isinstance(space, DiscreteSpace):
            return [CBall(space.special(i), Fraction(1, 4)) for i in range(n + 1)]
        if isinstance(space, Reals):
            return [CBall(Fraction(j), Fraction(1)) for j in range(-n, n + 1)]
        raise PreconditionFailed(f"No closed-form σ-sequence for {space.key}")

    # Dovetail path

    def _neighborhood_of(self, p: Any) -> CBall:
        if p not in self._neighborhoods:
            nb = closed_ball_neighborhood(CauchyName.of(p), self.lcs, self.space)
            self._neighborhoods[p] = nb.cball
        return self._neighborhoods[p]

    def _dovetail_base(self, n: int) -> List[CBall]:
        return [self._neighborhood_of(self.space.special(i)) for i in range(n + 1) if self.space.has_special(i)]

    def _prune(self, balls: List[CBall]) -> List[CBall]:
        kept: List[CBall] = []
        for ball in balls:
            if not (kept and self.space.covered_by(ball, kept)):
                kept.append(ball)
        return kept

    def _refine(self, n: int) -> Tuple[List[CBall], Fraction]:
        """K_{n+1} from K_n together with the least refinement slack."""
        space = self.space
        extra: List[CBall] = []
        least: Optional[Fraction] = None
        for cb in self._levels[n]:
            m = n + 1
            while True:
                found = []
                for ball in space.closed_ball_compact_name(cb.center, cb.radius).cover_at(m):
                    nb = self._neighborhood_of(ball.center)
                    slack = nb.radius - space.distance(nb.center, ball.center) - dyadic(m)
                    found.append((nb, slack))
                if all(slack > 0 for _, slack in found):
                    break
                m += 1
                if m > n + 24:
                    logger.error(f"No positive refinement slack for {cb} up to level {m}")
                    raise PromiseViolation("Local structure gives no positive refinement slack", {"ball": str(cb)})
            for nb, slack in found:
                extra.append(nb)
                least = slack if least is None else min(least, slack)
        return self._prune(self._dovetail_base(n + 1) + extra), least

    def _ensure(self, n: int) -> None:
        if len(self._levels) > n + 1 and len(self._margins) > n:
            return
        with self._lock:
            if self.method == "canonical":
                while len(self._levels) <= n + 1:
                    k = len(self._levels)
                    self._levels.append(self._canonical_level(k))
                    self._margins.append(dyadic(k + 2))
                return
            if not self._levels:
                self._levels.append(self._prune(self._dovetail_base(0)))
            while len(self._margins) <= n:
                k = len(self._margins)
                level, least = self._refine(k)
                self._levels.append(level)
                if k == 0:
                    margin = min(least, Fraction(1)) / 2
                else:
                    margin = min(least, self._margins[k - 1] / 2, dyadic(k)) / 2
                self._margins.append(margin)
                logger.debug(f"dovetail level {k + 1}: {len(level)} balls, c_{k} = {margin}")

    def K(self, n: int) -> List[CBall]:
        self._ensure(n)
        return self._levels[n]

    def c(self, n: int) -> Fraction:
        self._ensure(n)
        return self._margins[n]

    def compact_name(self, n: int) -> CompactName:
        balls = self.K(n)

        def cover_at(m: int) -> List[Ball]:
            seen: Dict[Ball, None] = {}
            for cb in balls:
                for ball in self.space.closed_ball_compact_name(cb.center, cb.radius).cover_at(m):
                    seen.setdefault(ball, None)
            return list(seen)

        return CompactName(cover_at, label=f"K_{n}")

    def level_specials(self, n: int) -> Optional[List[Any]]:
        points: List[Any] = []
        for cb in self.K(n):
            inside = self.space.ball_specials(cb)
            if inside is None:
                return None
            points.extend(p for p in inside if p not in points)
        return sorted(points, key=self.space.index_of)

    def dist(self, p: Any, n: int) -> Fraction:
        """Exact distance from a special to K_n."""
        return min(self.space.distance_to_ball(p, cb) for cb in self.K(n))

    def locate_special(self, p: Any, budget: int = 100000) -> Tuple[int, int]:
        for n in range(budget):
            for idx, cb in enumerate(self.K(n)):
                if self.space.contains(cb, p):
                    return n, idx
        raise BudgetExhausted(f"{p} not located within {budget} levels", {"point": str(p)})

    def locate_name(self, x: CauchyName, budget: int = 100000) -> Tuple[int, int, int]:
        """(level, ball index, precision) certifying x in an open ball of K_n."""
        for step, (n, m) in enumerate(cantor_pairs()):
            if step >= budget:
                break
            p = x.at(m)
            for idx, cb in enumerate(self.K(n)):
                if self.space.distance(p, cb.center) + dyadic(m) < cb.radius:
                    return n, idx, m
        logger.warning(f"locate gave up on {x.label} after {budget} steps")
        raise BudgetExhausted("Point not located within budget", {"point": x.label, "budget": budget})

    def locate(self, x: CauchyName, budget: int = 100000) -> Tuple[int, int]:
        if x.exact:
            return self.locate_special(x.point, budget)
        n, idx, _ = self.locate_name(x, budget)
        return n, idx

    def check_contract(self, n_max: int, probes: Optional[List[CauchyName]] = None) -> CheckReport:
        fmt = self.space.format_point
        for n in range(n_max + 1):
            c = self.c(n)
            if c > dyadic(n) or self.c(n + 1) > c / 2:
                return CheckReport(check="sigma_contract", passed=False, level=n, message=f"margin c_{n} = {c}")
            for cb in self.K(n):
                if not self.space.covered_by(CBall(cb.center, cb.radius + c), self.K(n + 1)):
                    return CheckReport(
                        check="sigma_contract", passed=False, level=n, witness=[fmt(cb.center)],
                        message="fattened ball escapes the next level",
                    )
        for probe in probes or []:
            self.locate(probe)
        return CheckReport(check="sigma_contract", passed=True, level=n_max,
                           details={"probes": len(probes or [])})


def sigma_sequence(space: PolishSpace, lcs: Optional[LocallyCompactStructure] = None,
                   method: str = "canonical") -> SigmaSequence:
    return SigmaSequence(space, lcs, method)


class ProperMetric:
    """
    δ(x, y) = d(x, y) + |f(x) - f(y)| with f = Σ f_n and
    f_n(x) = min(d(x, K_n) / c_n, 1).
    """

    def __init__(self, space: PolishSpace, ssq: SigmaSequence):
        if space.compact:
            logger.warning(f"Remetrizing compact {space.key}; δ differs from d by a bounded term only")
        self.space = space
        self.ssq = ssq
        self._f_cache: Dict[Any, Fraction] = {}

    def term(self, p: Any, n: int) -> Fraction:
        return min(self.ssq.dist(p, n) / self.ssq.c(n), Fraction(1))

    def f_special(self, p: Any) -> Fraction:
        if p not in self._f_cache:
            level, _ = self.ssq.locate_special(p)
            self._f_cache[p] = sum((self.term(p, n) for n in range(level)), Fraction(0))
        return self._f_cache[p]

    def lipschitz(self, level: int) -> Fraction:
        return sum((1 / self.ssq.c(n) for n in range(level)), Fraction(0))

    def _anchor(self, x: CauchyName, prec: int) -> Any:
        """A special p with d(x, p) + |f(x) - f(p)| ≤ 2^-prec."""
        if x.exact:
            return x.point
        level, idx, m0 = self.ssq.locate_name(x)
        cb = self.ssq.K(level)[idx]
        slack = cb.radius - self.space.distance(x.at(m0), cb.center) - dyadic(m0)
        bound = 1 + self.lipschitz(level)
        m = m0
        while dyadic(m) > slack or dyadic(m) * bound > dyadic(prec):
            m += 1
        return x.at(m)

    def f(self, x: CauchyName, prec: int) -> Fraction:
        return self.f_special(self._anchor(x, prec))

    def delta_special(self, a: Any, b: Any) -> Fraction:
        return self.space.distance(a, b) + abs(self.f_special(a) - self.f_special(b))

    def delta(self, x: CauchyName, y: CauchyName, prec: int) -> Fraction:
        return self.delta_special(self._anchor(x, prec + 2), self._anchor(y, prec + 2))

    def to_delta_name(self, x: CauchyName) -> CauchyName:
        if x.exact:
            return x
        return CauchyName(lambda n: self._anchor(x, n), label=f"delta({x.label})")

    def from_delta_name(self, y: CauchyName) -> CauchyName:
        # δ ≥ d, so a δ-fast name is d-fast
        return CauchyName(y.at, point=y.point, label=y.label)

    def diameter_bound(self) -> Optional[Fraction]:
        return None


def proper_remetrize(space: PolishSpace, ssq: SigmaSequence) -> ProperMetric:
    return ProperMetric(space, ssq)


def delta_ball_finiteness_check(pm: ProperMetric, center: Any, r: Fraction, budget: int = 1000) -> DeltaBallResult:
    """Specials within closed δ-distance r of center; the δ-ball lies in K_N."""
    level = floor(pm.f_special(center) + r) + 1
    fmt = pm.space.format_point
    specials = pm.ssq.level_specials(level)
    if specials is not None:
        inside = [p for p in specials if pm.delta_special(center, p) <= r]
        return DeltaBallResult(points=[fmt(p) for p in inside], level=level, complete=True)
    logger.warning(f"K_{level} of {pm.space.key} has infinitely many specials; scanning {budget}")
    inside = [p for p in pm.space.specials(budget) if pm.delta_special(center, p) <= r]
    return DeltaBallResult(points=[fmt(p) for p in inside], level=level, complete=False)


def bounded_test(space: PolishSpace, budget: int, metric: Optional[ProperMetric] = None) -> BoundedResult:
    """
    Search a pair (x, r) with d(x, y) ≤ r on a window of specials, accepted
    only when the instance's diameter certificate confirms it.
    """
    distance = metric.delta_special if metric else space.distance
    diameter = metric.diameter_bound() if metric else space.diameter_bound()
    window = space.specials(get_settings().bounded_probe_window)
    steps = 0
    for i, k in cantor_pairs():
        if steps >= budget:
            break
        steps += 1
        if not space.has_special(i):
            continue
        x = space.special(i)
        r = Fraction(0) if k == 0 else Fraction(2 ** (k - 1))
        passed = True
        for y in window:
            steps += 1
            if distance(x, y) > r:
                passed = False
                break
        if passed and diameter is not None and diameter <= r:
            logger.info(f"{space.key} bounded: every point within {r} of {x}")
            return BoundedResult(verdict=Verdict.BOUNDED, point=space.format_point(x),
                                 radius=format_rational(r), steps=steps)
    return BoundedResult(verdict=Verdict.UNRESOLVED, steps=steps)
