from __future__ import annotations

import argparse

from ..arith import format_scalar, parse_scalar
from ..cfengine import path_key
from ..irregular import t_infinity_proposition
from ..jobs import INFINITY, Job, build_tree
from ..log_utils import get_logger
from ..symmetry import detect, even_criterion, odd_symmetry_locus, symmetry_algebra_check
from ._output import add_common, emit

log = get_logger(__name__)


def run(job: Job, args: argparse.Namespace) -> int:
    tree = build_tree(job)
    h = tree.element
    paths = {}
    ok = True
    for path in sorted(tree.maximal_paths()):
        report = detect(h, tree.path_states(path))
        algebra = symmetry_algebra_check(report)
        ok = ok and algebra.passed
        paths[path_key(path) or "root"] = {"symmetry": report.model_dump(), "algebra": algebra.model_dump()}
    doc = {"paths": paths}

    y_text = job.y.strip().lower()
    if not job.center_at_infinity and y_text not in INFINITY and y_text != "center":
        even = even_criterion(job.poly_x(), parse_scalar(job.y))
        found = any(p["symmetry"]["even_centers"] for p in paths.values())
        doc["even_criterion"] = {"X(y)=0": even, "even_center_found": found}
        if even and job.depth >= 1 and not found:
            log.warning("X(y) = 0 but no even centre detected", code="Symmetry")
            ok = False
    if y_text in INFINITY:
        prop = t_infinity_proposition(job.poly_s(), job.resolved_genus(), depth=job.depth)
        doc["t_infinity"] = prop.model_dump()
        ok = ok and prop.holds
    if args.locus:
        locus = odd_symmetry_locus(job.poly_s(), job.resolved_genus())
        doc["odd_locus"] = {
            "s_degree": locus.s_degree,
            "discriminant_degree": locus.discriminant_degree,
            "points": [
                {"s": format_scalar(p.s), "lambda": format_scalar(p.lam), "residual": max(p.residual_q, p.residual_ds)}
                for p in locus.points
            ],
        }
    emit(doc, args)
    return 0 if ok else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("symmetry", help="Periodicity and even/odd symmetry of the expansion paths")
    add_common(parser)
    parser.add_argument("--locus", action="store_true", help="Also solve Q_X = dQ_X/ds = 0")
    parser.set_defaults(handler=run)
