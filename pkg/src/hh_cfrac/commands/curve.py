from __future__ import annotations

import argparse

from ..arith import format_scalar, tau, to_scalar
from ..curve import Curve, commuting_residual, divisor_of, dynamics_step, index_report, morphism, ramification
from ..errors import HHError
from ..jobs import Job
from ..log_utils import get_logger
from ._output import add_common, emit

log = get_logger(__name__)


def _divisor_doc(D) -> dict:
    return {
        "z": format_scalar(D.z),
        "points": [{"x": format_scalar(P.x), "z": format_scalar(P.z)} for P in D.sorted_points()],
    }


def run(job: Job, args: argparse.Namespace) -> int:
    curve = Curve.of(job.poly_s(), job.resolved_genus())
    ram = ramification(curve)
    summary = ram.summary(curve.genus)
    doc = {"genus": curve.genus, "ramification": summary}
    ok = bool(summary["consistent"])

    if job.point_x is not None:
        P = curve.point(to_scalar(job.point_x), -1 if job.point_branch == "negative" else 1)
        image = morphism(curve, P)
        residual = commuting_residual(curve, P)
        ok = ok and residual <= float(tau())
        doc["point"] = {"x": format_scalar(P.x), "z": format_scalar(P.z), "lambda": format_scalar(image.lam)}
        doc["commuting_residual"] = residual
        D = divisor_of(curve, image.lam)
        doc["divisor"] = _divisor_doc(D)
        doc["dynamics_step"] = [_divisor_doc(child) for child in dynamics_step(curve, D)]
        try:
            rep = index_report(curve, P)
            doc["index"] = rep.model_dump()
            ok = ok and rep.agrees
        except HHError as exc:
            log.warning("index not available", code=exc.code, reason=exc.message)
            doc["index"] = {"error": exc.code}
    emit(doc, args)
    return 0 if ok else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("curve", help="Ramification, morphism, divisors and the index of a point")
    add_common(parser)
    parser.set_defaults(handler=run)
