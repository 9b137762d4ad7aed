import argparse

from app.models.report_models import BallModel
from app.routers.router import Outcome, Router, arg
from app.utils.exactreal import format_rational
from app.utils.registry import get_compactification
from app.utils.space import CauchyName

router = Router("compactify", help="One-point compactification")


@router.command("dist", help="Star distance between two points", arguments=[
    arg("instance"),
    arg("p"),
    arg("q"),
    arg("--prec", type=int, default=None),
])
def dist(args: argparse.Namespace) -> Outcome:
    ops = get_compactification(args.instance)
    x, y = (CauchyName.of(ops.parse_point(t), label=t) for t in (args.p, args.q))
    return Outcome(format_rational(ops.star_distance(x, y, args.prec)))


@router.command("h", help="Distance to ∞", arguments=[
    arg("instance"),
    arg("point"),
])
def escape(args: argparse.Namespace) -> Outcome:
    ops = get_compactification(args.instance)
    return Outcome(format_rational(ops.h(ops.parse_point(args.point))))


@router.command("cover", help="The finite cover B(∞, c_n) ∪ K_{n+1} cover", arguments=[
    arg("instance"),
    arg("--level", type=int, default=2),
])
def cover(args: argparse.Namespace) -> Outcome:
    ops = get_compactification(args.instance)
    balls = [BallModel(center=ops.format_point(b.center), radius=format_rational(b.radius))
             for b in ops.star_cover(args.level)]
    return Outcome(balls, summary={"balls": len(balls)})
