import argparse
from typing import Any, Dict, List

from app.models.report_models import Verdict
from app.routers.router import Outcome, Router, arg
from app.utils.chabauty import complement_name, embed_closed_subgroup, enumerate_counterwitnesses, refute_subgroup
from app.utils.errors import UsageError
from app.utils.exactreal import format_rational
from app.utils.groups import multiples, subgroup_closed_name
from app.utils.hyperspace import HyperCauchyName, parse_set
from app.utils.registry import get_compactification, get_group

router = Router("chabauty", help="Closed subgroups inside the hyperspace of G*")


def _candidate(args: argparse.Namespace):
    g, ops = get_group(args.instance), get_compactification(args.instance)
    if (args.set is None) == (args.subgroup is None):
        raise UsageError("Give exactly one of --set and --subgroup")
    if args.set is not None:
        return g, ops, HyperCauchyName.of(parse_set(args.set, ops), label=args.set)
    k = args.subgroup
    closed = subgroup_closed_name(g, multiples(k), label=f"{k}Z")
    return g, ops, embed_closed_subgroup(closed, g, ops)


@router.command("refute", help="Search a refutation that a closed set is a subgroup", arguments=[
    arg("instance"),
    arg("--set", default=None, help="Finite set literal, e.g. 0,1,inf"),
    arg("--subgroup", type=int, default=None, help="The subgroup kZ together with inf"),
    arg("--budget", type=int, default=None),
])
def refute(args: argparse.Namespace) -> Outcome:
    g, ops, k = _candidate(args)
    steps: List[Dict[str, Any]] = []
    result = refute_subgroup(k, g, ops, args.budget, trace=steps)
    summary = {"verdict": result.verdict.value, "refuted": result.verdict == Verdict.REFUTED, "steps": result.steps}
    return Outcome(result, steps=steps, summary=summary)


@router.command("counterwitnesses", help="First certified counterwitness triples", arguments=[
    arg("instance"),
    arg("--count", type=int, default=5),
    arg("--budget", type=int, default=None),
])
def counterwitnesses(args: argparse.Namespace) -> Outcome:
    g, ops = get_group(args.instance), get_compactification(args.instance)
    found = []
    for item, _ in zip(enumerate_counterwitnesses(g, ops), range(args.budget)):
        if item is not None:
            found.append(item.to_model(ops))
            if len(found) >= args.count:
                break
    return Outcome(found, summary={"found": len(found)})


@router.command("complement", help="Hyperspace balls enumerated into the complement of S(G)", arguments=[
    arg("instance"),
    arg("--steps", type=int, default=2000),
])
def complement(args: argparse.Namespace) -> Outcome:
    g, ops = get_group(args.instance), get_compactification(args.instance)
    balls = complement_name(g, ops).take(args.steps)
    result = [{"center": item.ball.center.literal(ops), "radius": format_rational(item.ball.radius),
               "reason": item.reason} for item in balls]
    return Outcome(result, summary={"balls": len(result)})
