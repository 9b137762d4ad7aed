import argparse

from app.routers.router import Outcome, Router, arg
from app.utils.errors import NotSatisfied
from app.utils.simplegroup import (ReqState, check_embedding, diagonalization_witness, load_oracles,
                                   run_construction, shipped_oracles, substitution_forest_acyclic)

router = Router("simple-group", help="Finite-injury construction of a computably simple free abelian group")


@router.command("run", help="Run the construction against oracle doubles", arguments=[
    arg("--oracles", default=None, help="JSON file of oracle doubles; the four built-in doubles otherwise"),
    arg("--stages", type=int, default=200),
])
def run(args: argparse.Namespace) -> Outcome:
    oracles = load_oracles(args.oracles) if args.oracles else shipped_oracles()
    trace = run_construction(oracles, args.stages)

    embedding_ok, broken = True, None
    for s in range(len(trace.stages) - 1):
        ok, pair = check_embedding(trace, s)
        if not ok:
            embedding_ok, broken = False, {"stage": s, "codes": list(pair)}
            break

    witnesses, unverified = [], []
    for req in trace.requirements:
        if req.state == ReqState.SATISFIED:
            try:
                witnesses.append(diagonalization_witness(req, trace))
            except NotSatisfied:
                unverified.append(req.index)
    summary = {
        "states": {f"R{r.index}": r.state.value for r in trace.requirements},
        "injuries": {f"R{r.index}": r.injuries for r in trace.requirements},
        "witnesses": [w.model_dump() for w in witnesses],
        "embedding_ok": embedding_ok,
        "unverified": unverified,
        "free_abelian": substitution_forest_acyclic(trace.final),
    }
    if broken:
        summary["broken"] = broken
    result = {"oracles": [o.description for o in oracles], **summary}
    return Outcome(result, exit_code=0 if embedding_ok and not unverified else 1, steps=trace.records, summary=summary)

