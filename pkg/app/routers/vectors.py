import argparse

from app.routers.router import Outcome, Router, arg
from app.utils.vectors import VECTOR_TABLES, emit_test_vectors

router = Router("vectors", help="Worked example values against independent oracles")


@router.command("emit", help="Emit the test vectors of one module", arguments=[
    arg("module", choices=sorted(VECTOR_TABLES)),
])
def emit(args: argparse.Namespace) -> Outcome:
    entries = emit_test_vectors(args.module)
    return Outcome(entries, summary={"module": args.module, "entries": len(entries)})
