"""
Computable Polish groups: shipped instances, group operations on names and
the effectively open product and inverse of open sets.

Every shipped metric is translation invariant, so multiplication is
1-Lipschitz in each argument and names are combined one level deeper.
"""
import logging
import random
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Callable, Iterator, List, Optional, Sequence, Tuple

from app.models.report_models import CheckReport
from app.utils.exactreal import dyadic
from app.utils.locally_compact import LocallyCompactStructure
from app.utils.errors import PreconditionFailed
from app.utils.simplegroup import ConstructionTrace, CodeBook, add_forms, format_form, parse_form, scale_form
from app.utils.space import (
    Ball, CauchyName, ClosedName, DiscreteIntegers, DiscreteSpace, DyadicIntegers, OpenName, PolishSpace, Reals,
    tuples_by_sum,
)

logger = logging.getLogger(__name__)

Triple = Tuple[Any, Any, Any]


class ComputableGroup(ABC):
    """A computable Polish group with exact products of specials."""

    key: str = "group"
    space: PolishSpace
    identity: Any = 0

    @abstractmethod
    def mul(self, a: Any, b: Any) -> Any:
        pass

    @abstractmethod
    def inverse(self, a: Any, n: int) -> Tuple[Any, Fraction]:
        """A special within the returned error of a⁻¹, the error being at most 2^-n."""

    @property
    def compact(self) -> bool:
        return self.space.compact

    @property
    def lcs(self) -> LocallyCompactStructure:
        return LocallyCompactStructure.canonical(self.space)

    def subtract(self, a: Any, b: Any) -> Any:
        """a·b⁻¹ for a special b with an exact inverse."""
        inv, err = self.inverse(b, 0)
        if err:
            raise PreconditionFailed(f"{self.space.format_point(b)} has no special inverse in {self.key}")
        return self.mul(a, inv)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"


class IntegerGroup(ComputableGroup):
    key = "discrete-z"

    def __init__(self):
        self.space = DiscreteIntegers()

    def mul(self, a: int, b: int) -> int:
        return a + b

    def inverse(self, a: int, n: int) -> Tuple[int, Fraction]:
        return -a, Fraction(0)


class RealGroup(ComputableGroup):
    key = "reals"

    def __init__(self):
        self.space = Reals()
        self.identity = Fraction(0)

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def inverse(self, a: Fraction, n: int) -> Tuple[Fraction, Fraction]:
        return -a, Fraction(0)


class DyadicGroup(ComputableGroup):
    """ℤ₂ under addition; negatives of naturals are approximated by residues."""

    key = "z2"

    def __init__(self):
        self.space = DyadicIntegers()

    def mul(self, a: int, b: int) -> int:
        return a + b

    def inverse(self, a: int, n: int) -> Tuple[int, Fraction]:
        if a == 0:
            return 0, Fraction(0)
        return (-a) % 2 ** (n + 2), dyadic(n + 2)


class CodeSpace(DiscreteSpace):
    """Codes of a presented discrete group, enumerated by code number."""

    key = "free-abelian-simple"

    def __init__(self, book: CodeBook):
        self.book = book

    def special(self, i: int) -> int:
        self.book.ensure(i)
        return i

    def index_of(self, p: int) -> int:
        if p < 0:
            raise PreconditionFailed(f"Codes are naturals, got {p}")
        return p

    def format_point(self, p: int) -> str:
        return format_form(self.book.form(p))

    def parse_point(self, text: str) -> int:
        return self.book.code_of(parse_form(text))


class FreeAbelianGroup(ComputableGroup):
    """The group presented by a finished construction trace."""

    key = "free-abelian-simple"

    def __init__(self, trace: ConstructionTrace):
        if trace.book is None:
            raise PreconditionFailed("Trace carries no code book")
        self.trace = trace
        self.book = trace.book.copy(trace.final.normal_form)
        self.space = CodeSpace(self.book)

    def mul(self, a: int, b: int) -> int:
        return self.book.code_of(add_forms(self.book.form(a), self.book.form(b)))

    def inverse(self, a: int, n: int) -> Tuple[int, Fraction]:
        return self.book.code_of(scale_form(self.book.form(a), -1)), Fraction(0)


# Names


def mul_names(g: ComputableGroup, x: CauchyName, y: CauchyName) -> CauchyName:
    label = f"{x.label}·{y.label}"
    if x.exact and y.exact:
        return CauchyName.of(g.mul(x.point, y.point), label=label)
    return CauchyName(lambda n: g.mul(x.at(n + 1), y.at(n + 1)), label=label)


def inv_names(g: ComputableGroup, x: CauchyName) -> CauchyName:
    label = f"{x.label}⁻¹"
    if x.exact:
        q, err = g.inverse(x.point, 0)
        if err == 0:
            return CauchyName.of(q, label=label)
        return CauchyName(lambda n: g.inverse(x.point, n + 1)[0], label=label)
    return CauchyName(lambda n: g.inverse(x.at(n + 1), n + 1)[0], label=label)


class _Cursor:
    """Lazy list of the balls a ticking stream has produced so far."""

    def __init__(self, name: OpenName):
        self._stream = name.stream()
        self.balls: List[Ball] = []
        self.done = False

    def tick(self) -> None:
        if self.done:
            return
        try:
            ball = next(self._stream)
        except StopIteration:
            self.done = True
            return
        if ball is not None and ball not in self.balls:
            self.balls.append(ball)

    def available(self, i: int) -> Optional[bool]:
        """True if ball i is known, None if it may still come, False if never."""
        if i < len(self.balls):
            return True
        return False if self.done else None


def open_mul(g: ComputableGroup, u: OpenName, v: OpenName) -> OpenName:
    """
    B(x_i·b, t) for every special x_i certified inside a ball of U and every
    ball B(b, t) of V, dovetailed over (U ball, special, V ball).
    """
    space = g.space

    def stream() -> Iterator[Optional[Ball]]:
        left, right = _Cursor(u), _Cursor(v)
        emitted = set()
        for iu, i, iv in tuples_by_sum(3):
            if not space.has_special(i):
                yield None
                continue
            while True:
                have_u, have_v = left.available(iu), right.available(iv)
                if have_u is False or have_v is False or (have_u and have_v):
                    break
                left.tick()
                right.tick()
                yield None
            if have_u is False or have_v is False:
                yield None
                continue
            ub, vb = left.balls[iu], right.balls[iv]
            xi = space.special(i)
            if space.contains(ub, xi):
                out = Ball(g.mul(xi, vb.center), vb.radius)
                if out not in emitted:
                    emitted.add(out)
                    yield out
                    continue
            yield None

    return OpenName(stream, label=f"{u.label}·{v.label}")


def open_inv(g: ComputableGroup, u: OpenName) -> OpenName:
    def stream() -> Iterator[Optional[Ball]]:
        source = _Cursor(u)
        emitted = set()
        for idx, n in tuples_by_sum(2):
            while source.available(idx) is None:
                source.tick()
                yield None
            if not source.available(idx):
                yield None
                continue
            ball = source.balls[idx]
            q, err = g.inverse(ball.center, n)
            if err < ball.radius:
                out = Ball(q, ball.radius - err)
                if out not in emitted:
                    emitted.add(out)
                    yield out
                    continue
            yield None

    return OpenName(stream, label=f"{u.label}⁻¹")


# Validation


def sample_triples(space: PolishSpace, count: int, seed: int, window: int = 64) -> List[Triple]:
    rng = random.Random(seed)
    top = window if space.special_count is None else min(window, space.special_count)
    return [tuple(space.special(rng.randrange(top)) for _ in range(3)) for _ in range(count)]


def check_group_axioms(g: ComputableGroup, samples: Sequence[Triple], prec: int) -> CheckReport:
    space, tol = g.space, dyadic(prec)
    fmt = space.format_point
    e = g.identity
    for a, b, c in samples:
        witness = [fmt(a), fmt(b), fmt(c)]
        if space.distance(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c))) > tol:
            logger.info(f"{g.key}: associativity fails on {witness}")
            return CheckReport(check="group_axioms", passed=False, level=prec, witness=witness, message="associativity")
        if space.distance(g.mul(a, e), a) > tol or space.distance(g.mul(e, a), a) > tol:
            return CheckReport(check="group_axioms", passed=False, level=prec, witness=witness, message="identity")
        inv, _ = g.inverse(a, prec)
        if space.distance(g.mul(a, inv), e) > tol or space.distance(g.mul(inv, a), e) > tol:
            return CheckReport(check="group_axioms", passed=False, level=prec, witness=witness, message="inverse")
    logger.info(f"{g.key}: group axioms hold on {len(samples)} triples at precision {prec}")
    return CheckReport(check="group_axioms", passed=True, level=prec, details={"samples": len(samples)})


def multiples(k: int) -> Callable[[Any], bool]:
    """Membership in kℤ; k = 0 gives the trivial subgroup."""
    if k == 0:
        return lambda p: p == 0
    return lambda p: p % k == 0


def subgroup_closed_name(g: ComputableGroup, member: Callable[[Any], bool], label: str = "") -> ClosedName:
    """Closed name of a decidable subgroup of a discrete group."""
    space = g.space
    if not isinstance(space, DiscreteSpace):
        raise PreconditionFailed(f"{g.key} is not discrete")

    def meets(ball: Ball) -> bool:
        inside = space.ball_specials(ball)
        return True if inside is None else any(member(p) for p in inside)

    return ClosedName.from_predicate(space, meets, label=label)
