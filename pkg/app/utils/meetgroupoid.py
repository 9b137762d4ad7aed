"""
Meet groupoids of compact open cosets over depth-bounded fragments: the
groupoid and semilattice operations, the axiom checker, ideals and the
correspondence with closed subgroups and open sets.
"""
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import product as cartesian
from math import gcd
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from app.models.report_models import AxiomFailure, AxiomReport, IdealKind, IdealReport
from app.utils.errors import NotIdempotent, PreconditionFailed, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Coset:
    """residue + modulus(level)·G; level -1 is the empty coset."""
    level: int
    residue: int

    @property
    def is_empty(self) -> bool:
        return self.level < 0


EMPTY = Coset(-1, 0)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class MeetGroupoid(ABC):
    """Cosets of the open subgroups modulus(l)·G of an abelian group."""

    key = "groupoid"

    @abstractmethod
    def modulus(self, level: int) -> int:
        pass

    @abstractmethod
    def levels(self, depth: int) -> List[int]:
        pass

    @abstractmethod
    def level_of(self, modulus: int) -> int:
        pass

    @abstractmethod
    def refinement_level(self, depth: int) -> int:
        """Finest level of the fragment; its cosets refine every coset of the fragment."""

    def coset(self, residue: int, level: int) -> Coset:
        return Coset(level, residue % self.modulus(level))

    def subgroup(self, level: int) -> Coset:
        return Coset(level, 0)

    def elements(self, depth: int) -> List[Coset]:
        out = [EMPTY]
        for level in self.levels(depth):
            out.extend(Coset(level, a) for a in range(self.modulus(level)))
        return out

    def is_idempotent(self, a: Coset) -> bool:
        return not a.is_empty and a.residue == 0

    def product(self, a: Coset, b: Coset) -> Optional[Coset]:
        """None when undefined: both cosets must belong to the same subgroup."""
        if a.is_empty and b.is_empty:
            return EMPTY
        if a.is_empty or b.is_empty or a.level != b.level:
            return None
        return self.coset(a.residue + b.residue, a.level)

    def inverse(self, a: Coset) -> Coset:
        if a.is_empty:
            return EMPTY
        return self.coset(-a.residue, a.level)

    def meet(self, a: Coset, b: Coset) -> Coset:
        if a.is_empty or b.is_empty:
            return EMPTY
        ma, mb = self.modulus(a.level), self.modulus(b.level)
        if (a.residue - b.residue) % gcd(ma, mb):
            return EMPTY
        m = lcm(ma, mb)
        if m == mb:
            return b
        if m == ma:
            return a
        for k in range(m // ma):
            x = a.residue + k * ma
            if (x - b.residue) % mb == 0:
                return Coset(self.level_of(m), x)
        return EMPTY

    def contains(self, a: Coset, b: Coset) -> bool:
        return self.meet(a, b) == b

    def contains_point(self, a: Coset, x: int) -> bool:
        return not a.is_empty and (x - a.residue) % self.modulus(a.level) == 0

    def index_fn(self, u: Coset, v: Coset) -> int:
        """|U : U ∩ V| for subgroups U and V."""
        for w in (u, v):
            if not self.is_idempotent(w):
                raise NotIdempotent(f"{self.literal(w)} is not a subgroup", {"coset": self.literal(w)})
        mu, mv = self.modulus(u.level), self.modulus(v.level)
        return lcm(mu, mv) // mu

    def refinement(self, a: Coset, depth: int) -> List[Coset]:
        if a.is_empty:
            return []
        top = self.refinement_level(depth)
        ma, mt = self.modulus(a.level), self.modulus(top)
        if mt % ma:
            raise PreconditionFailed(f"{self.literal(a)} lies outside the depth-{depth} fragment")
        return [Coset(top, a.residue + k * ma) for k in range(mt // ma)]

    def literal(self, a: Coset) -> str:
        return "EMPTY" if a.is_empty else f"{a.residue}+{self.modulus(a.level)}Z"

    def parse(self, text: str) -> Coset:
        text = text.strip()
        if text == "EMPTY":
            return EMPTY
        match = re.fullmatch(r"(-?\d+)\+(\d+)Z", text)
        if not match:
            raise UsageError(f"Coset literals look like 1+4Z, got {text!r}")
        return self.coset(int(match.group(1)), self.level_of(int(match.group(2))))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"


class PadicGroupoid(MeetGroupoid):
    """W(ℤ_p): level n holds the cosets of p^n ℤ_p."""

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, p)):
            raise PreconditionFailed(f"{p} is not a prime")
        self.p = p
        self.key = f"z{p}"

    def modulus(self, level: int) -> int:
        return self.p ** level

    def levels(self, depth: int) -> List[int]:
        return list(range(depth + 1))

    def level_of(self, modulus: int) -> int:
        level = 0
        while self.p ** level < modulus:
            level += 1
        if self.p ** level != modulus:
            raise UsageError(f"{modulus} is not a power of {self.p}")
        return level

    def refinement_level(self, depth: int) -> int:
        return depth

    # Tree presentation: nodes are LSB-first digit strings

    def node(self, a: Coset) -> str:
        digits, x = [], a.residue
        for _ in range(a.level):
            digits.append(str(x % self.p))
            x //= self.p
        return "".join(digits)

    def coset_of_node(self, node: str) -> Coset:
        residue = sum(int(d) * self.p ** i for i, d in enumerate(node))
        return Coset(len(node), residue)

    def branching(self, node: str) -> int:
        return self.p


class FiniteCyclicGroupoid(MeetGroupoid):
    """Cosets of the subgroups dℤ/nℤ of ℤ/nℤ; level i is the i-th divisor."""

    def __init__(self, n: int):
        if n < 1:
            raise PreconditionFailed("ℤ/nℤ needs n >= 1")
        self.n = n
        self.divisors = [d for d in range(1, n + 1) if n % d == 0]
        self.key = f"zmod{n}"

    def modulus(self, level: int) -> int:
        return self.divisors[level]

    def levels(self, depth: int) -> List[int]:
        return list(range(min(depth, len(self.divisors) - 1) + 1))

    def level_of(self, modulus: int) -> int:
        if modulus not in self.divisors:
            raise UsageError(f"{modulus} does not divide {self.n}")
        return self.divisors.index(modulus)

    def refinement_level(self, depth: int) -> int:
        return len(self.divisors) - 1


# Axioms


def _first_failures(carrier: MeetGroupoid, depth: int) -> Iterable[Tuple[str, List[Coset]]]:
    elements = carrier.elements(depth)
    prod, inv, meet = carrier.product, carrier.inverse, carrier.meet

    def then(x: Optional[Coset], y: Coset) -> Optional[Coset]:
        return None if x is None else prod(x, y)

    for a, b, c in cartesian(elements, repeat=3):
        left = then(prod(a, b), c)
        bc = prod(b, c)
        right = None if bc is None else prod(a, bc)
        if left != right:
            yield "a", [a, b, c]
            break

    for a in elements:
        if prod(a, inv(a)) is None or prod(inv(a), a) is None:
            yield "b", [a]
            break

    for a, b in cartesian(elements, repeat=2):
        ab = prod(a, b)
        if ab is None:
            continue
        if then(ab, inv(b)) != a or then(prod(inv(a), a), b) != b:
            yield "c", [a, b]
            break

    if inv(EMPTY) != EMPTY or prod(EMPTY, EMPTY) != EMPTY:
        yield "d", [EMPTY]
    else:
        for a in elements:
            if not a.is_empty and (prod(EMPTY, a) is not None or prod(a, EMPTY) is not None):
                yield "d", [a]
                break

    idempotents = [u for u in elements if not u.is_empty and prod(u, u) == u]
    for u, v in cartesian(idempotents, repeat=2):
        if meet(u, v).is_empty:
            yield "e", [u, v]
            break

    for a, b in cartesian(elements, repeat=2):
        if (meet(a, b) == a) != (meet(inv(a), inv(b)) == inv(a)):
            yield "f", [a, b]
            break

    for a, b in cartesian(elements, repeat=2):
        if meet(a, b) != meet(b, a) or meet(a, EMPTY) != EMPTY or meet(a, a) != a:
            yield "meet", [a, b]
            break

    # (g) only involves cosets that meet, so index those per level
    meets: Dict[Coset, Dict[int, List[Coset]]] = {}
    for a in elements:
        if a.is_empty:
            continue
        table: Dict[int, List[Coset]] = {}
        for b in elements:
            if not b.is_empty and not meet(a, b).is_empty:
                table.setdefault(b.level, []).append(b)
        meets[a] = table
    defined = [(a, b, prod(a, b)) for a, b in cartesian(elements, repeat=2)
               if not a.is_empty and prod(a, b) is not None]
    for a1, b1, ab1 in defined:
        for level, lefts in sorted(meets[a1].items()):
            for a0, b0 in cartesian(lefts, meets[b1].get(level, [])):
                ab0 = prod(a0, b0)
                if ab0 is None:
                    continue
                lhs = prod(meet(a0, a1), meet(b0, b1))
                if lhs != meet(ab0, ab1):
                    yield "g", [a0, a1, b0, b1]
                    return


def check_axioms(carrier: MeetGroupoid, depth: int) -> AxiomReport:
    """Exhaustive check of the groupoid and meet axioms on all cosets of level ≤ depth."""
    failures = [AxiomFailure(axiom=name, witness=[carrier.literal(c) for c in witness])
                for name, witness in _first_failures(carrier, depth)]
    elements = len(carrier.elements(depth))
    if failures:
        logger.info(f"{carrier.key} depth {depth}: axioms {[f.axiom for f in failures]} fail")
    else:
        logger.info(f"{carrier.key} depth {depth}: all axioms hold on {elements} elements")
    return AxiomReport(instance=carrier.key, depth=depth, passed=not failures, elements=elements, failures=failures)


def covers_decide(carrier: MeetGroupoid, a: Coset, bs: Sequence[Coset], depth: int) -> bool:
    """Every refinement coset of A at the depth lies inside some B_i."""
    for c in [a, *bs]:
        if not c.is_empty and c.level not in carrier.levels(depth):
            raise PreconditionFailed(f"{carrier.literal(c)} is deeper than {depth}")
    return all(any(carrier.contains(b, c) for b in bs) for c in carrier.refinement(a, depth))


# Ideals


@dataclass(frozen=True)
class IdealSpec:
    member: Callable[[Coset], bool]
    description: str


def build_ideal(text: str, carrier: MeetGroupoid) -> IdealSpec:
    """
    avoid-subgroup:N, avoid-point:x, avoid-set:x,y, avoid-coset:a:k,
    inside-subgroup:N, empty or all.
    """
    kind, _, arg = text.partition(":")
    try:
        if kind == "avoid-subgroup":
            s = carrier.subgroup(carrier.level_of(int(arg)))
            return IdealSpec(lambda a: a.is_empty or carrier.meet(a, s).is_empty, text)
        if kind == "inside-subgroup":
            s = carrier.subgroup(carrier.level_of(int(arg)))
            return IdealSpec(lambda a: a.is_empty or carrier.contains(s, a), text)
        if kind == "avoid-point":
            x = int(arg)
            return IdealSpec(lambda a: not carrier.contains_point(a, x), text)
        if kind == "avoid-set":
            points = [int(t) for t in arg.split(",") if t.strip()]
            return IdealSpec(lambda a: not any(carrier.contains_point(a, x) for x in points), text)
        if kind == "avoid-coset":
            residue, level = arg.split(":")
            s = carrier.coset(int(residue), int(level))
            return IdealSpec(lambda a: a.is_empty or carrier.meet(a, s).is_empty, text)
    except ValueError as e:
        raise UsageError(f"Malformed ideal {text!r}: {e}") from e
    if kind == "empty":
        return IdealSpec(lambda a: a.is_empty, text)
    if kind == "all":
        return IdealSpec(lambda a: True, text)
    raise UsageError(f"Unknown ideal {text!r}")


def _covered(carrier: MeetGroupoid, members: Sequence[Coset], depth: int) -> Set[Coset]:
    cells: Set[Coset] = set()
    for b in members:
        cells.update(carrier.refinement(b, depth))
    return cells


def subgroup_violations(j: IdealSpec, carrier: MeetGroupoid, depth: int) -> List[Tuple[Coset, Coset, Coset]]:
    """Triples (A, B, A·B) with A·B in J while neither A nor B is."""
    out = []
    for a, b in cartesian(carrier.elements(depth), repeat=2):
        ab = carrier.product(a, b)
        if ab is not None and j.member(ab) and not j.member(a) and not j.member(b):
            out.append((a, b, ab))
    return out


def ideal_kind(j: IdealSpec, carrier: MeetGroupoid, depth: int) -> IdealReport:
    """
    NOT_IDEAL only when J misses the empty coset or a coset it covers.
    Inversion closure is a precondition of the two subgroup kinds. A
    closed-subgroup witness whose product misses the identity is preferred.
    """
    elements = carrier.elements(depth)
    members = [a for a in elements if j.member(a)]
    cells = _covered(carrier, members, depth)
    witnesses: Dict[str, List[Coset]] = {}

    def first(name: str, cases: Iterable[List[Coset]]) -> bool:
        for case in cases:
            witnesses[name] = case
            return False
        return True

    conditions = {
        "contains_empty": j.member(EMPTY),
        "ideal": first("ideal", ([a] for a in elements
                                 if not j.member(a) and all(c in cells for c in carrier.refinement(a, depth)))),
        "inversion": first("inversion", ([a] for a in members if not j.member(carrier.inverse(a)))),
        "open_subgroup": first("open_subgroup", (
            [a, b, carrier.product(a, b)] for a, b in cartesian(members, repeat=2)
            if carrier.product(a, b) is not None and not j.member(carrier.product(a, b)))),
        "closed_subgroup": first("closed_subgroup", ([a, b, ab] for a, b, ab in sorted(
            subgroup_violations(j, carrier, depth), key=lambda t: carrier.contains_point(t[2], 0)))),
        "identity_outside": first("identity_outside", ([a] for a in members if carrier.contains_point(a, 0))),
        "identity_inside": any(carrier.contains_point(a, 0) for a in members),
    }
    if not conditions["contains_empty"]:
        witnesses["contains_empty"] = [EMPTY]

    failed = next((c for c in ("contains_empty", "ideal") if not conditions[c]), None)
    if failed is not None:
        kind = IdealKind.NOT_IDEAL
    else:
        inverse_closed = conditions["inversion"]
        closed = inverse_closed and conditions["closed_subgroup"] and conditions["identity_outside"]
        opened = inverse_closed and conditions["open_subgroup"] and conditions["identity_inside"]
        if closed and opened:
            kind = IdealKind.BOTH
        elif closed:
            kind = IdealKind.CLOSED_SUBGROUP_IDEAL
        elif opened:
            kind = IdealKind.OPEN_SUBGROUP_IDEAL
        else:
            kind = IdealKind.IDEAL
        if not closed:
            failed = next(c for c in ("closed_subgroup", "identity_outside", "inversion") if not conditions[c])
            if failed == "identity_outside":
                logger.warning(f"{j.description}: J covers the identity, so S_J is empty")
    literal = carrier.literal
    report = IdealReport(
        ideal=j.description,
        depth=depth,
        kind=kind,
        witness=[literal(c) for c in witnesses.get(failed, [])] if failed else [],
        failed_condition=failed,
        conditions=conditions,
        witnesses={name: [literal(c) for c in case] for name, case in witnesses.items()},
    )
    logger.info(f"{j.description} on {carrier.key} at depth {depth}: {kind.value}")
    return report


def _tree(carrier: MeetGroupoid) -> PadicGroupoid:
    if not isinstance(carrier, PadicGroupoid):
        raise PreconditionFailed(f"{carrier.key} has no tree presentation")
    return carrier


def gamma(j: IdealSpec, carrier: MeetGroupoid, depth: int) -> Set[str]:
    """Nodes of level ≤ depth whose cylinder meets S_J = G − ⋃J."""
    tree = _tree(carrier)
    elements = tree.elements(depth)
    cells = _covered(tree, [a for a in elements if j.member(a)], depth)
    return {tree.node(a) for a in elements
            if not a.is_empty and not j.member(a) and not all(c in cells for c in tree.refinement(a, depth))}


def ideal_to_open(j: IdealSpec, carrier: MeetGroupoid, depth: int) -> Set[str]:
    """Nodes whose cylinder lies inside ⋃J at the depth."""
    tree = _tree(carrier)
    elements = tree.elements(depth)
    cells = _covered(tree, [a for a in elements if j.member(a)], depth)
    return {tree.node(a) for a in elements
            if not a.is_empty and all(c in cells for c in tree.refinement(a, depth))}


def open_to_ideal(nodes: Iterable[str], carrier: MeetGroupoid, depth: int) -> IdealSpec:
    tree = _tree(carrier)
    region = set(nodes)

    def inside(node: str) -> bool:
        return any(node[:i] in region for i in range(len(node) + 1))

    def member(a: Coset) -> bool:
        return a.is_empty or all(inside(tree.node(c)) for c in tree.refinement(a, depth))

    if not region:
        logger.warning("open_to_ideal of the empty region is the ideal {EMPTY}")
    return IdealSpec(member, f"open({','.join(sorted(region))})")


def subgroup_subtree(carrier: PadicGroupoid, k: int, depth: int) -> Set[str]:
    """Nodes of level ≤ depth meeting p^k ℤ_p."""
    return {carrier.node(a) for a in carrier.elements(depth)
            if not a.is_empty and all(d == "0" for d in carrier.node(a)[:k])}


def is_subtree(nodes: Set[str], carrier: PadicGroupoid, depth: int) -> bool:
    """Prefix-closed with every node below the depth extended."""
    for node in nodes:
        if node[:-1] not in nodes and node:
            return False
        if len(node) < depth and not any(node + str(d) in nodes for d in range(carrier.branching(node))):
            return False
    return True
