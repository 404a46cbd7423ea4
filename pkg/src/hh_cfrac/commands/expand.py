from __future__ import annotations

import argparse

from ..cfengine import chain_verify, tree_to_dict
from ..jobs import Job, build_tree
from ..log_utils import get_logger
from ._output import add_common, emit

log = get_logger(__name__)


def run(job: Job, args: argparse.Namespace) -> int:
    tree = build_tree(job)
    chain = chain_verify(tree, job.resolved_order())
    doc = tree_to_dict(tree)
    doc["chain"] = chain.model_dump()
    emit(doc, args)
    if not chain.passed:
        log.warning("chain identity residual above tolerance", code="Chain", max_residual=chain.max_residual)
        return 1
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("expand", help="Expand the element and write the branch tree as JSON")
    add_common(parser)
    parser.set_defaults(handler=run)
