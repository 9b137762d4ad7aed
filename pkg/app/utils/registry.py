"""
Instance registry: string keys to spaces, groups, compactifications,
compact sets and meet groupoids.
"""
import logging
import re
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List

from app.utils.errors import UsageError
from app.utils.groups import ComputableGroup, DyadicGroup, FreeAbelianGroup, IntegerGroup, RealGroup
from app.utils.meetgroupoid import FiniteCyclicGroupoid, MeetGroupoid, PadicGroupoid
from app.utils.onepoint import OnePointSpace, compactify
from app.utils.simplegroup import run_construction, shipped_oracles
from app.utils.space import CompactName, DiscreteIntegers, DyadicIntegers, FiniteDiscreteSpace, PolishSpace, Reals

logger = logging.getLogger(__name__)

SPACES: Dict[str, Callable[[], PolishSpace]] = {
    "discrete-z": DiscreteIntegers,
    "reals": Reals,
    "z2": DyadicIntegers,
}

GROUPS: Dict[str, Callable[[], ComputableGroup]] = {
    "discrete-z": IntegerGroup,
    "reals": RealGroup,
    "z2": DyadicGroup,
}

_FINITE = re.compile(r"finite-(\d+)")
_ZMOD = re.compile(r"zmod(\d+)")

DEFAULT_CONSTRUCTION_STAGES = 50


def known_keys() -> List[str]:
    return sorted(SPACES) + ["finite-<k>", "free-abelian-simple"]


@lru_cache(maxsize=None)
def get_space(key: str) -> PolishSpace:
    if key in SPACES:
        return SPACES[key]()
    match = _FINITE.fullmatch(key)
    if match:
        return FiniteDiscreteSpace(int(match.group(1)))
    if key == "free-abelian-simple":
        return get_group(key).space
    raise UsageError(f"Unknown instance {key!r}", {"known": known_keys()})


@lru_cache(maxsize=None)
def get_group(key: str) -> ComputableGroup:
    if key in GROUPS:
        return GROUPS[key]()
    if key == "free-abelian-simple":
        logger.info(f"building free-abelian-simple from a {DEFAULT_CONSTRUCTION_STAGES}-stage construction")
        return FreeAbelianGroup(run_construction(shipped_oracles(), DEFAULT_CONSTRUCTION_STAGES))
    raise UsageError(f"Unknown group {key!r}", {"known": sorted(GROUPS) + ["free-abelian-simple"]})


@lru_cache(maxsize=None)
def get_compactification(key: str) -> OnePointSpace:
    return compactify(get_space(key))


def get_compact(key: str) -> CompactName:
    """Compact sets for the clopen split detector."""
    if key == "unit-interval":
        return Reals().closed_ball_compact_name(Fraction(1, 2), Fraction(1, 2))
    space = get_space(key)
    if not space.compact:
        raise UsageError(f"{key} is not compact", {"instance": key})
    if space.special_count is not None:
        points = space.specials(space.special_count)
        return space.closed_ball_compact_name(points[0], Fraction(2)) if len(points) > 1 else \
            space.closed_ball_compact_name(points[0], Fraction(1, 2))
    return space.closed_ball_compact_name(space.special(0), Fraction(1))


def compact_space(key: str) -> PolishSpace:
    return Reals() if key == "unit-interval" else get_space(key)


@lru_cache(maxsize=None)
def get_groupoid(key: str) -> MeetGroupoid:
    if key in ("z2", "z3"):
        return PadicGroupoid(int(key[1:]))
    match = _ZMOD.fullmatch(key)
    if match:
        return FiniteCyclicGroupoid(int(match.group(1)))
    raise UsageError(f"Unknown groupoid {key!r}", {"known": ["z2", "z3", "zmod<n>"]})
