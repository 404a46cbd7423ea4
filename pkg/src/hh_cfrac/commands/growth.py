from __future__ import annotations

import argparse

from ..arith import parse_scalar, to_scalar
from ..curve import Curve, growth_profile, lambda_of
from ..errors import MalformedInput
from ..jobs import Job
from ._output import add_common, emit, write_text


def run(job: Job, args: argparse.Namespace) -> int:
    curve = Curve.of(job.poly_s(), job.resolved_genus())
    if job.start_lambda is not None:
        start = parse_scalar(job.start_lambda)
    elif job.point_x is not None:
        start = lambda_of(curve, curve.point(to_scalar(job.point_x), -1 if job.point_branch == "negative" else 1))
    else:
        raise MalformedInput("growth needs start_lambda or point_x")
    profile = growth_profile(curve, start, max(job.depth, 1))
    if args.format == "csv":
        write_text(profile.to_csv(), args)
    else:
        emit(profile.model_dump(), args)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("growth", help="Distinct lambda-values per level of the divisor dynamics")
    add_common(parser)
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="Artifact format")
    parser.set_defaults(handler=run)
