"""
Finite-injury construction of a computably simple presentation of the free
abelian group of rank ω.

Elements are formal sums over generators b_0, b_1, ...; relations send a
fresh generator to a multiple of an element over free generators, so normal
forms need a single substitution pass.
"""
import json
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field

from app.config import get_settings
from app.models.report_models import WitnessRecord
from app.utils.errors import (
    NotSatisfied, OracleInstability, PreconditionFailed, PreservationViolation, UsageError,
)

logger = logging.getLogger(__name__)

Form = Tuple[Tuple[int, int], ...]
ZERO: Form = ()


def make_form(coeffs: Dict[int, int]) -> Form:
    return tuple(sorted((g, c) for g, c in coeffs.items() if c))


def generator(i: int) -> Form:
    return ((i, 1),)


def add_forms(*forms: Form) -> Form:
    total: Dict[int, int] = {}
    for f in forms:
        for g, c in f:
            total[g] = total.get(g, 0) + c
    return make_form(total)


def scale_form(f: Form, k: int) -> Form:
    return make_form({g: k * c for g, c in f})


def max_coefficient(f: Form) -> int:
    return max((abs(c) for _, c in f), default=0)


def format_form(f: Form) -> str:
    if not f:
        return "0"
    parts = []
    for g, c in f:
        term = f"b{g}" if abs(c) == 1 else f"{abs(c)}b{g}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    text = "".join(f"{s}{t}" for s, t in parts)
    return text[1:] if text.startswith("+") else text


_TERM = re.compile(r"([+-]?)(\d*)b(\d+)")


def parse_form(text: str) -> Form:
    text = text.replace(" ", "")
    if text in ("", "0"):
        return ZERO
    pos, coeffs = 0, {}
    for match in _TERM.finditer(text):
        if match.start() != pos:
            raise UsageError(f"Malformed element literal {text!r}")
        sign, digits, gen = match.groups()
        c = int(digits) if digits else 1
        g = int(gen)
        coeffs[g] = coeffs.get(g, 0) + (-c if sign == "-" else c)
        pos = match.end()
    if pos != len(text):
        raise UsageError(f"Malformed element literal {text!r}")
    return make_form(coeffs)


def substitute(f: Form, relations: Dict[int, Form]) -> Form:
    parts = []
    for g, c in f:
        image = relations.get(g)
        parts.append(scale_form(image, c) if image is not None else ((g, c),))
    return add_forms(*parts)


def zigzag(m: int) -> int:
    return 2 * m - 1 if m > 0 else -2 * m


def _vectors(length: int, bound: int, norm: int) -> Iterator[Tuple[int, ...]]:
    if length == 0:
        if norm == 0:
            yield ()
        return
    for first in range(-min(bound, norm), min(bound, norm) + 1):
        for rest in _vectors(length - 1, bound, norm - abs(first)):
            yield (first,) + rest


def formal_sums() -> Iterator[Form]:
    """
    Formal sums stage by stage: at stage t the vectors over b_0..b_t with
    entries in [-t, t] not seen before, by L1 norm, then by zigzag ranks read
    from the highest generator.
    """
    yield ZERO
    t = 1
    while True:
        for norm in range(1, t * (t + 1) + 1):
            block = [v for v in _vectors(t + 1, t, norm) if v[t] != 0 or any(abs(x) == t for x in v)]
            block.sort(key=lambda v: tuple(zigzag(x) for x in reversed(v)))
            for v in block:
                yield make_form(dict(enumerate(v)))
        t += 1


class CodeBook:
    """Append-only code assignment: code -> birth form, normal form -> code."""

    def __init__(self, normal_form: Callable[[Form], Form]):
        self.normal_form = normal_form
        self.forms: List[Form] = []
        self.index: Dict[Form, int] = {}
        self._source = formal_sums()
        self._consumed = 0

    def ensure(self, code: int) -> None:
        while len(self.forms) <= code:
            f = next(self._source)
            self._consumed += 1
            if self.normal_form(f) not in self.index:
                self._add(f)

    def _add(self, f: Form) -> int:
        code = len(self.forms)
        self.forms.append(f)
        self.index[self.normal_form(f)] = code
        return code

    def code_of(self, f: Form) -> int:
        """Code of the element, assigning the next code on demand."""
        nf = self.normal_form(f)
        if nf in self.index:
            return self.index[nf]
        return self._add(f)

    def form(self, code: int) -> Form:
        self.ensure(code)
        return self.forms[code]

    def reindex(self) -> None:
        self.index = {}
        for code, f in enumerate(self.forms):
            self.index.setdefault(self.normal_form(f), code)

    def copy(self, normal_form: Callable[[Form], Form]) -> "CodeBook":
        twin = CodeBook(normal_form)
        twin.forms = list(self.forms)
        for _ in range(self._consumed):
            next(twin._source)
        twin._consumed = self._consumed
        twin.reindex()
        return twin


@dataclass(frozen=True)
class StageStructure:
    """Snapshot G_s: relations, coded birth forms and the largest constant used."""
    stage: int
    relations: Tuple[Tuple[int, Form], ...] = ()
    codes: Tuple[Form, ...] = ()
    largest_constant: int = 0

    @property
    def relation_map(self) -> Dict[int, Form]:
        return dict(self.relations)

    def normal_form(self, f: Form) -> Form:
        return substitute(f, self.relation_map)

    def with_relation(self, target: int, expr: Form) -> "StageStructure":
        """Add target ↦ expr without any check."""
        relations = dict(self.relations)
        relations[target] = expr
        return replace(self, relations=tuple(sorted(relations.items())),
                       largest_constant=max(self.largest_constant, max_coefficient(expr)))

    def free_generators(self, upto: int) -> List[int]:
        targets = self.relation_map
        return [i for i in range(upto + 1) if i not in targets]


def normal_form(st: StageStructure, f: Form) -> Form:
    return st.normal_form(f)


@dataclass(frozen=True)
class Single:
    n: int


@dataclass(frozen=True)
class Pair:
    n: int
    m: int
    second: int


def gcd_ext(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def next_prime(n: int) -> int:
    """Smallest prime exceeding n."""
    p = n + 1
    while not is_prime(p):
        p += 1
    return p


def largest_constant(st: StageStructure) -> int:
    coded = max((max_coefficient(st.normal_form(f)) for f in st.codes), default=0)
    related = max((max_coefficient(e) for _, e in st.relations), default=0)
    return max(st.stage, related, coded, st.largest_constant)


def introduce_relation(st: StageStructure, target: int, expr: Form, mode: Union[Single, Pair]) -> StageStructure:
    """
    Declare target = n·expr (and second = m·expr in pair mode), checking that
    the diagram window and all coded elements stay pairwise distinct.
    """
    relations = st.relation_map
    expr = st.normal_form(expr)
    lc = largest_constant(st)
    targets = [target] + ([mode.second] if isinstance(mode, Pair) else [])
    used = {g for e in relations.values() for g, _ in e} | {g for g, _ in expr}
    if not expr:
        raise PreconditionFailed("Relation image must be non-zero in normal form")
    for t in targets:
        if t in relations or t in used:
            raise PreconditionFailed(f"b{t} is not a fresh generator", {"target": t})
    if mode.n <= lc:
        raise PreconditionFailed(f"Multiplier {mode.n} does not exceed largest constant {lc}",
                                 {"n": mode.n, "largest_constant": lc})
    if isinstance(mode, Pair):
        if mode.m <= lc or gcd_ext(mode.n, mode.m)[0] != 1:
            raise PreconditionFailed(f"Pair ({mode.n}, {mode.m}) must be coprime and exceed {lc}")
        if mode.second == target:
            raise PreconditionFailed("Pair targets must differ")

    updated = dict(relations)
    updated[target] = scale_form(expr, mode.n)
    if isinstance(mode, Pair):
        updated[mode.second] = scale_form(expr, mode.m)

    # G_s only mentions b_0..b_s
    touched = sorted(g for g in {g for g, _ in expr} | set(targets) if g <= st.stage)
    window = min(st.stage, get_settings().diagram_window)
    seen: Dict[Form, Form] = {}
    for coeffs in product(range(-window, window + 1), repeat=len(touched)):
        f = make_form(dict(zip(touched, coeffs)))
        image = substitute(f, updated)
        if image in seen:
            logger.error(f"Relation b{target} merges {format_form(seen[image])} and {format_form(f)}")
            raise PreservationViolation("Relation merges distinct elements of the diagram window",
                                        {"pair": [format_form(seen[image]), format_form(f)]})
        seen[image] = f

    images: Dict[Form, int] = {}
    for code, f in enumerate(st.codes):
        image = substitute(f, updated)
        if image in images:
            logger.error(f"Relation b{target} merges codes {images[image]} and {code}")
            raise PreservationViolation("Relation merges coded elements", {"codes": [images[image], code]})
        images[image] = code

    constants = [mode.n] + ([mode.m] if isinstance(mode, Pair) else [])
    after = StageStructure(stage=st.stage, relations=tuple(sorted(updated.items())), codes=st.codes,
                           largest_constant=max([lc] + [c * max_coefficient(expr) for c in constants]))
    logger.debug(f"stage {st.stage}: b{target} ↦ {mode.n}·({format_form(expr)}), window {len(seen)} forms")
    return after


# Oracle doubles


class OracleDouble(ABC):
    """Stand-in for φ_e: answers 0/1 on codes, or None to diverge this stage."""

    name = "oracle"

    @abstractmethod
    def answer(self, code: int, form: Form, stage: int) -> Optional[int]:
        pass

    @property
    def description(self) -> str:
        return self.name


class ConstantOne(OracleDouble):
    name = "constant-1"

    def answer(self, code: int, form: Form, stage: int) -> Optional[int]:
        return 1


class Parity(OracleDouble):
    """1 exactly on birth forms with even coefficient sum."""

    name = "parity"

    def answer(self, code: int, form: Form, stage: int) -> Optional[int]:
        return 1 if sum(c for _, c in form) % 2 == 0 else 0


class MultiplesOfFirstSeen(OracleDouble):
    name = "multiples-of-first-seen"

    def __init__(self):
        self.first: Optional[Form] = None

    def answer(self, code: int, form: Form, stage: int) -> Optional[int]:
        if self.first is None:
            self.first = form
        if not form or not self.first:
            return 1
        g, c = self.first[0]
        coeffs = dict(form)
        if c == 0 or coeffs.get(g, 0) % c:
            return 1
        k = coeffs.get(g, 0) // c
        return 0 if k and scale_form(self.first, k) == form else 1


class DelayedParity(Parity):
    name = "delayed-parity"

    def __init__(self, delay: int = 2):
        self.delay = delay
        self.first_query: Dict[int, int] = {}

    def answer(self, code: int, form: Form, stage: int) -> Optional[int]:
        first = self.first_query.setdefault(code, stage)
        if stage < first + self.delay:
            return None
        return super().answer(code, form, stage)

    @property
    def description(self) -> str:
        return f"{self.name}(delay={self.delay})"


class OracleSpec(BaseModel):
    name: str = Field(..., description="constant-1, parity, multiples-of-first-seen or delayed-parity")
    delay: int = Field(2, ge=0, description="Stages an answer is withheld (delayed-parity only)")

    class Config:
        json_schema_extra = {
            "example": {
                "name": "delayed-parity",
                "delay": 2
            }
        }


ORACLE_DOUBLES = {
    "constant-1": lambda spec: ConstantOne(),
    "parity": lambda spec: Parity(),
    "multiples-of-first-seen": lambda spec: MultiplesOfFirstSeen(),
    "delayed-parity": lambda spec: DelayedParity(spec.delay),
}


def shipped_oracles() -> List[OracleDouble]:
    return [ConstantOne(), Parity(), MultiplesOfFirstSeen(), DelayedParity()]


def build_oracle(spec: OracleSpec) -> OracleDouble:
    factory = ORACLE_DOUBLES.get(spec.name)
    if factory is None:
        raise UsageError(f"Unknown oracle double {spec.name!r}", {"known": sorted(ORACLE_DOUBLES)})
    return factory(spec)


def load_oracles(path: str) -> List[OracleDouble]:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except (OSError, ValueError) as e:
        raise UsageError(f"Cannot read oracle file {path}: {e}") from e
    if isinstance(raw, dict):
        raw = raw.get("oracles", [])
    return [build_oracle(OracleSpec(**entry)) for entry in raw]


# Requirements


class ReqState(str, Enum):
    WAITING_XY = "WAITING_XY"
    PICKED = "PICKED"
    SATISFIED = "SATISFIED"
    STUCK = "STUCK"


@dataclass
class Requirement:
    index: int
    state: ReqState = ReqState.WAITING_XY
    cursor: int = 1
    x: Optional[int] = None
    y: Optional[int] = None
    j: Optional[int] = None
    k: Optional[int] = None
    j_answer: Optional[int] = None
    case: Optional[int] = None
    target: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    initializations: int = 0
    injuries: int = 0

    @property
    def has_parameters(self) -> bool:
        return any(v is not None for v in (self.x, self.y, self.j)) or self.state == ReqState.SATISFIED

    def initialize(self) -> None:
        if self.has_parameters:
            self.injuries += 1
        self.initializations += 1
        self.state = ReqState.WAITING_XY
        self.cursor = 1
        self.x = self.y = self.j = self.k = self.j_answer = None
        self.case = self.target = self.n = self.m = None

    def snapshot(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "state": self.state.value,
            "x": self.x, "y": self.y, "j": self.j, "k": self.k,
            "case": self.case, "injuries": self.injuries,
        }


@dataclass
class ConstructionTrace:
    oracles: List[OracleDouble]
    stages: List[StageStructure]
    requirements: List[Requirement]
    answers: Dict[Tuple[int, int], int]
    forms: List[Form]
    records: List[Dict[str, Any]] = field(default_factory=list)
    injury_log: List[List[int]] = field(default_factory=list)
    book: Optional[CodeBook] = None

    @property
    def final(self) -> StageStructure:
        return self.stages[-1]

    def form(self, code: int) -> Form:
        return self.forms[code]


class Construction:
    """Stage loop; the highest-priority requirement able to act acts."""

    def __init__(self, oracles: Sequence[OracleDouble]):
        self.oracles = list(oracles)
        self.relations: Dict[int, Form] = {}
        self.book = CodeBook(self._normal_form)
        self.requirements = [Requirement(e) for e in range(len(self.oracles))]
        self.answers: Dict[Tuple[int, int], int] = {}
        self.picks: List[int] = []
        self.largest = 0
        self.stage = 0

    def _normal_form(self, f: Form) -> Form:
        return substitute(f, self.relations)

    def structure(self) -> StageStructure:
        return StageStructure(stage=self.stage, relations=tuple(sorted(self.relations.items())),
                              codes=tuple(self.book.forms), largest_constant=self.largest)

    def _seen(self) -> int:
        gens = [g for f in self.book.forms for g, _ in f]
        gens += list(self.relations) + [g for e in self.relations.values() for g, _ in e]
        return max([self.stage, len(self.book.forms) - 1] + gens + self.picks)

    def _query(self, e: int, code: int) -> Optional[int]:
        form = self.book.form(code)
        answer = self.oracles[e].answer(code, form, self.stage)
        if answer is None:
            return None
        cached = self.answers.get((e, code))
        if cached is not None and cached != answer:
            logger.error(f"Oracle {e} changed its answer on code {code}: {cached} -> {answer}")
            raise OracleInstability(f"Oracle {e} is not stable on code {code}",
                                    {"requirement": e, "code": code, "before": cached, "after": answer})
        self.answers[(e, code)] = answer
        return answer

    def _step(self, req: Requirement) -> Optional[Tuple[str, int]]:
        if req.state == ReqState.SATISFIED:
            return None
        if req.state == ReqState.WAITING_XY:
            code = req.cursor
            answer = self._query(req.index, code)
            if answer is None:
                return None
            req.cursor += 1
            if answer == 0 and req.y is None:
                req.y = code
            elif answer == 1 and req.x is None and self._normal_form(self.book.form(code)):
                req.x = code
            if req.x is not None and req.y is not None:
                req.j = max(self._seen(), 3 * req.index) + 1
                req.k = req.j + 1
                self.picks += [req.j, req.k]
                req.state = ReqState.PICKED
                logger.debug(f"stage {self.stage}: R{req.index} picks b{req.j}, b{req.k}")
            return None
        target = req.j if req.j_answer is None else req.k
        answer = self._query(req.index, self.book.code_of(generator(target)))
        if answer is None:
            return None
        if answer == 0:
            return "case1", target
        if target == req.j:
            req.j_answer = 1
            return None
        return "case2", target

    def _act(self, req: Requirement, action: Tuple[str, int]) -> str:
        kind, target = action
        st = self.structure()
        lc = largest_constant(st)
        n = 2 * (lc + self.stage + 2)
        if kind == "case1":
            expr = self.book.form(req.x)
            after = introduce_relation(st, target, expr, Single(n))
            req.case, req.target, req.n = 1, target, n
            note = f"R{req.index} case 1: b{target} = {n}·({format_form(self._normal_form(expr))})"
        else:
            m = next_prime(2 * n)
            expr = self.book.form(req.y)
            after = introduce_relation(st, req.j, expr, Pair(n, m, req.k))
            req.case, req.target, req.n, req.m = 2, req.j, n, m
            note = f"R{req.index} case 2: b{req.j} = {n}·y, b{req.k} = {m}·y with y = {format_form(self._normal_form(expr))}"
        self.relations = dict(after.relations)
        self.largest = after.largest_constant
        self.book.reindex()
        req.state = ReqState.SATISFIED
        logger.info(f"stage {self.stage}: {note}")
        return note

    def run(self, stages: int) -> ConstructionTrace:
        snapshots: List[StageStructure] = []
        records: List[Dict[str, Any]] = []
        injury_log: List[List[int]] = []
        for s in range(stages + 1):
            self.stage = s
            actions: List[str] = []
            initialized: List[int] = []
            for req in self.requirements:
                action = self._step(req)
                if action is None:
                    continue
                actions.append(self._act(req, action))
                for weaker in self.requirements[req.index + 1:]:
                    weaker.initialize()
                    initialized.append(weaker.index)
                break
            snapshots.append(self.structure())
            injury_log.append([r.injuries for r in self.requirements])
            records.append({
                "stage": s,
                "actions": actions,
                "initialized": initialized,
                "codes": len(self.book.forms),
                "relations": {f"b{g}": format_form(e) for g, e in sorted(self.relations.items())},
                "requirements": [r.snapshot() for r in self.requirements],
            })
        for req in self.requirements:
            if req.state == ReqState.PICKED:
                logger.warning(f"R{req.index} never got answers on its witnesses; recorded as STUCK")
                req.state = ReqState.STUCK
        return ConstructionTrace(oracles=self.oracles, stages=snapshots, requirements=self.requirements,
                                 answers=dict(self.answers), forms=list(self.book.forms),
                                 book=self.book.copy(snapshots[-1].normal_form),
                                 records=records, injury_log=injury_log)


def run_construction(oracles: Sequence[OracleDouble], stages: int) -> ConstructionTrace:
    return Construction(oracles).run(stages)


def check_embedding(trace: ConstructionTrace, s: int) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Equality of codes of G_s agrees between stage s and stage s+1."""
    if s + 1 >= len(trace.stages):
        raise PreconditionFailed(f"Stage {s + 1} is not in the trace")
    before, after = trace.stages[s], trace.stages[s + 1]
    first_before: Dict[Form, int] = {}
    first_after: Dict[Form, int] = {}
    for code, f in enumerate(before.codes):
        b, a = before.normal_form(f), after.normal_form(f)
        if (b in first_before) != (a in first_after) or first_before.get(b) != first_after.get(a):
            other = first_after.get(a, first_before.get(b))
            return False, (other, code)
        first_before.setdefault(b, code)
        first_after.setdefault(a, code)
    return True, None


def diagonalization_witness(req: Requirement, trace: ConstructionTrace) -> WitnessRecord:
    if req.state != ReqState.SATISFIED:
        raise NotSatisfied(f"R{req.index} is {req.state.value}", {"requirement": req.index})
    st = trace.final
    answers = {code: a for (e, code), a in trace.answers.items() if e == req.index}
    code_of = {st.normal_form(f): c for c, f in enumerate(trace.forms)}

    def answer_on(f: Form) -> Optional[int]:
        return answers.get(code_of.get(st.normal_form(f)))

    if req.case == 1:
        x = trace.form(req.x)
        bj = generator(req.target)
        if answer_on(x) != 1 or answer_on(bj) != 0 or st.normal_form(bj) != st.normal_form(scale_form(x, req.n)):
            raise NotSatisfied(f"R{req.index} case 1 witness does not verify")
        return WitnessRecord(requirement=req.index, case=1, x=format_form(x), b_j=f"b{req.target}", n=req.n)

    y = trace.form(req.y)
    bj, bk = generator(req.j), generator(req.k)
    g, a, b = gcd_ext(req.n, req.m)
    combined = add_forms(scale_form(bj, a), scale_form(bk, b))
    if (g != 1 or answer_on(y) != 0 or answer_on(bj) != 1 or answer_on(bk) != 1
            or st.normal_form(combined) != st.normal_form(y)):
        raise NotSatisfied(f"R{req.index} case 2 witness does not verify")
    return WitnessRecord(requirement=req.index, case=2, y=format_form(y), b_j=f"b{req.j}", b_k=f"b{req.k}",
                         n=req.n, m=req.m, bezout=[a, b])


def substitution_forest_acyclic(st: StageStructure) -> bool:
    targets = st.relation_map
    return all(g not in targets for e in targets.values() for g, _ in e)
