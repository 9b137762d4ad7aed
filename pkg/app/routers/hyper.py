import argparse

from app.models.report_models import Verdict
from app.routers.router import Outcome, Router, arg
from app.utils.exactreal import format_rational
from app.utils.hyperspace import clopen_split_search, hausdorff_distance, hyper_cover, parse_set
from app.utils.registry import compact_space, get_compact, get_compactification

router = Router("hyper", help="Hyperspace of closed subsets of M*")


@router.command("dh", help="Hausdorff distance of two finite sets", arguments=[
    arg("instance"),
    arg("set_a"),
    arg("set_b"),
    arg("--prec", type=int, default=None),
])
def dh(args: argparse.Namespace) -> Outcome:
    ops = get_compactification(args.instance)
    a, b = parse_set(args.set_a, ops), parse_set(args.set_b, ops)
    return Outcome(format_rational(hausdorff_distance(a, b, ops, args.prec)))


@router.command("cover", help="Centres of the hyperspace cover at a level", arguments=[
    arg("instance"),
    arg("--level", type=int, default=1),
])
def cover(args: argparse.Namespace) -> Outcome:
    ops = get_compactification(args.instance)
    balls = hyper_cover(args.level, ops)
    return Outcome([{"center": b.center.literal(ops), "radius": format_rational(b.radius)} for b in balls],
                   summary={"balls": len(balls)})


@router.command("split", help="Search a clopen split of a compact set", arguments=[
    arg("compact", help="finite-<k>, z2 or unit-interval"),
    arg("--budget", type=int, default=None),
])
def split(args: argparse.Namespace) -> Outcome:
    result = clopen_split_search(get_compact(args.compact), compact_space(args.compact), args.budget)
    return Outcome(result, summary={"verdict": result.verdict.value, "split": result.verdict == Verdict.SPLIT})
