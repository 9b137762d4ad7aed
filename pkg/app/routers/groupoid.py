import argparse

from app.routers.router import Outcome, Router, arg
from app.utils.meetgroupoid import build_ideal, check_axioms, gamma, ideal_kind, ideal_to_open, is_subtree
from app.utils.registry import get_groupoid

router = Router("groupoid", help="Meet groupoids of compact open cosets")

INSTANCE = arg("--instance", default="z2", help="z2, z3 or zmod<n>")
DEPTH = arg("--depth", type=int, default=4)


@router.command("check-axioms", help="Exhaustive axiom check up to a depth", arguments=[INSTANCE, DEPTH])
def check(args: argparse.Namespace) -> Outcome:
    report = check_axioms(get_groupoid(args.instance), args.depth)
    return Outcome(report, exit_code=0 if report.passed else 1,
                   summary={"passed": report.passed, "failures": len(report.failures)})


@router.command("ideal", help="Classify an ideal of the groupoid", arguments=[
    INSTANCE, DEPTH,
    arg("--ideal", required=True, help="avoid-subgroup:N, avoid-point:x, inside-subgroup:N, ..."),
])
def ideal(args: argparse.Namespace) -> Outcome:
    report = ideal_kind(build_ideal(args.ideal, get_groupoid(args.instance)), get_groupoid(args.instance), args.depth)
    return Outcome(report, summary={"kind": report.kind.value})


@router.command("gamma", help="Subtree of the closed subgroup of an ideal", arguments=[
    INSTANCE, DEPTH,
    arg("--ideal", required=True),
])
def subtree(args: argparse.Namespace) -> Outcome:
    carrier = get_groupoid(args.instance)
    j = build_ideal(args.ideal, carrier)
    nodes = sorted(gamma(j, carrier, args.depth), key=lambda n: (len(n), n))
    result = {
        "nodes": nodes,
        "subtree": is_subtree(set(nodes), carrier, args.depth),
        "open": sorted(ideal_to_open(j, carrier, args.depth), key=lambda n: (len(n), n)),
    }
    return Outcome(result, summary={"nodes": len(nodes)})


@router.command("index", help="Subgroup index |U : U ∩ V|", arguments=[
    INSTANCE,
    arg("u", help="Coset literal a+mZ"),
    arg("v"),
])
def index(args: argparse.Namespace) -> Outcome:
    carrier = get_groupoid(args.instance)
    return Outcome(carrier.index_fn(carrier.parse(args.u), carrier.parse(args.v)))
