from __future__ import annotations

import argparse

from ..approx import SQRT_CASE, approximation_report, best_choice_scan, regular_prefix
from ..cfengine import path_key
from ..jobs import Job, build_tree
from ..log_utils import get_logger
from ._output import add_common, emit, write_text

log = get_logger(__name__)


def run(job: Job, args: argparse.Namespace) -> int:
    tree = build_tree(job)
    order = job.resolved_order()
    reports = {}
    for path in sorted({regular_prefix(tree, p) for p in tree.maximal_paths()}):
        reports[path_key(path) or "root"] = approximation_report(tree, path, order)
    failed = [k for k, r in reports.items() if not r.passed]

    scan = None
    if job.candidates:
        scan = best_choice_scan(job.poly_x(), job.epsilon(), job.candidates, job.depth, order)
        if any(c.mode == SQRT_CASE for c in scan.ranking) and not scan.epsilon_first:
            log.warning("y = epsilon does not rank first", code="BestChoice")
            failed.append("best_choice")

    if args.table:
        write_text("".join(f"path {k}\n{r.to_table()}\n\n" for k, r in reports.items()), args)
    else:
        doc = {"reports": {k: r.model_dump() for k, r in reports.items()}}
        if scan is not None:
            doc["best_choice"] = scan.model_dump()
        emit(doc, args)
    for k in failed:
        log.warning("approximation checks failed", code="Approx", path=k)
    return 1 if failed else 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("convergents", help="Continuants, degrees and approximation orders")
    add_common(parser)
    parser.add_argument("--table", action="store_true", help="Human-readable table instead of JSON")
    parser.set_defaults(handler=run)
