import argparse

from app.routers.router import Outcome, Router, arg
from app.utils.groups import check_group_axioms, mul_names, sample_triples
from app.utils.registry import get_group
from app.utils.space import CauchyName

router = Router("group", help="Computable Polish groups")


@router.command("check", help="Group axioms on sampled special triples", arguments=[
    arg("instance"),
    arg("--samples", type=int, default=100),
    arg("--prec", type=int, default=None),
])
def check(args: argparse.Namespace) -> Outcome:
    g = get_group(args.instance)
    triples = sample_triples(g.space, args.samples, args.seed)
    report = check_group_axioms(g, triples, args.prec)
    return Outcome(report, exit_code=0 if report.passed else 1, summary={"passed": report.passed})


@router.command("mul", help="Product of two points", arguments=[
    arg("instance"),
    arg("a"),
    arg("b"),
    arg("--prec", type=int, default=None),
])
def mul(args: argparse.Namespace) -> Outcome:
    g = get_group(args.instance)
    x, y = (CauchyName.of(g.space.parse_point(t)) for t in (args.a, args.b))
    return Outcome(g.space.format_point(mul_names(g, x, y).at(args.prec)))
