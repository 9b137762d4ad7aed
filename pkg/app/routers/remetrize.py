import argparse

from app.routers.router import Outcome, Router, arg
from app.utils.exactreal import format_rational, parse_rational
from app.utils.locally_compact import bounded_test, delta_ball_finiteness_check, proper_remetrize, sigma_sequence
from app.utils.registry import get_space
from app.utils.space import CauchyName

router = Router("remetrize", help="Proper (Heine-Borel) remetrization")


def _metric(key: str):
    space = get_space(key)
    return space, proper_remetrize(space, sigma_sequence(space))


@router.command("delta", help="δ distance between two points", arguments=[
    arg("instance"),
    arg("p"),
    arg("q"),
    arg("--prec", type=int, default=None),
])
def delta(args: argparse.Namespace) -> Outcome:
    space, pm = _metric(args.instance)
    x, y = (CauchyName.of(space.parse_point(t)) for t in (args.p, args.q))
    return Outcome(format_rational(pm.delta(x, y, args.prec)))


@router.command("f", help="The proper function f at a point", arguments=[
    arg("instance"),
    arg("point"),
])
def proper_function(args: argparse.Namespace) -> Outcome:
    space, pm = _metric(args.instance)
    return Outcome(format_rational(pm.f_special(space.parse_point(args.point))))


@router.command("ball", help="Specials in a closed δ-ball", arguments=[
    arg("instance"),
    arg("center"),
    arg("radius"),
    arg("--budget", type=int, default=1000),
])
def ball(args: argparse.Namespace) -> Outcome:
    space, pm = _metric(args.instance)
    result = delta_ball_finiteness_check(pm, space.parse_point(args.center), parse_rational(args.radius), args.budget)
    return Outcome(result, summary={"complete": result.complete})


@router.command("bounded", help="Σ⁰₂ boundedness search", arguments=[
    arg("instance"),
    arg("--budget", type=int, default=None),
    arg("--delta", action="store_true", help="Test the remetrized space"),
])
def bounded(args: argparse.Namespace) -> Outcome:
    space = get_space(args.instance)
    metric = _metric(args.instance)[1] if args.delta else None
    result = bounded_test(space, args.budget, metric)
    return Outcome(result, summary={"verdict": result.verdict.value})
