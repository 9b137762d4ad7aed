import argparse

from app.models.report_models import BallModel
from app.routers.router import Outcome, Router, arg
from app.utils.exactreal import format_rational
from app.utils.locally_compact import sigma_sequence
from app.utils.registry import get_space
from app.utils.space import CauchyName

router = Router("sigma", help="Strong σ-compactness data")


@router.command("info", help="K_n presentations and margins c_n", arguments=[
    arg("instance"),
    arg("--levels", type=int, default=3),
    arg("--method", choices=["canonical", "dovetail"], default="canonical"),
])
def info(args: argparse.Namespace) -> Outcome:
    space = get_space(args.instance)
    ssq = sigma_sequence(space, method=args.method)
    levels = []
    for n in range(args.levels + 1):
        balls = [BallModel(center=space.format_point(b.center), radius=format_rational(b.radius), closed=True)
                 for b in ssq.K(n)]
        levels.append({"level": n, "balls": balls, "c": format_rational(ssq.c(n))})
    return Outcome(levels, summary={"levels": args.levels, "method": args.method})


@router.command("locate", help="Level and ball of K_n holding a point", arguments=[
    arg("instance"),
    arg("point"),
])
def locate(args: argparse.Namespace) -> Outcome:
    space = get_space(args.instance)
    p = space.parse_point(args.point)
    level, index = sigma_sequence(space).locate(CauchyName.of(p))
    return Outcome({"level": level, "index": index})


@router.command("check", help="Nesting and margin contract up to a level", arguments=[
    arg("instance"),
    arg("--levels", type=int, default=8),
    arg("--method", choices=["canonical", "dovetail"], default="canonical"),
])
def check(args: argparse.Namespace) -> Outcome:
    space = get_space(args.instance)
    probes = [CauchyName.of(p) for p in space.specials(20)]
    report = sigma_sequence(space, method=args.method).check_contract(args.levels, probes)
    return Outcome(report, exit_code=0 if report.passed else 1, summary={"passed": report.passed})
