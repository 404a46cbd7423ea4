"""Property sweep over one job: every identity the library can check on it."""

from __future__ import annotations

import argparse
from typing import Any, Callable, Dict, List

from ..approx import approximation_report, regular_prefix
from ..arith import tau
from ..bal import BALTriplet, solve_bal_linear
from ..cfengine import chain_verify, path_key, reconstruct_series
from ..curve import Curve, ramification
from ..errors import HHError, InputError, NumericalDegeneration
from ..jobs import Job, build_tree
from ..log_utils import get_logger
from ..spectral import edge_relations, normal_form_g1, normal_form_g2, viete_checks
from ..symmetry import detect, symmetry_algebra_check
from ._output import add_common, emit

log = get_logger(__name__)


class _Sweep:
    def __init__(self) -> None:
        self.checks: List[Dict[str, Any]] = []
        self.degenerate = False

    def run(self, name: str, fn: Callable[[], Any]) -> None:
        try:
            passed, detail = fn()
        except InputError:
            raise
        except HHError as exc:
            log.warning("check not evaluated", code=exc.code, check=name, reason=exc.message)
            self.checks.append({"name": name, "passed": False, "error": exc.code, "reason": exc.message})
            self.degenerate = True
            return
        if not passed:
            log.warning("check failed", code="Verify", check=name)
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.degenerate:
            return NumericalDegeneration.exit_code
        return 0 if self.passed else 1



def _uniqueness(tree) -> tuple:
    h, root = tree.element, tree.root
    other: BALTriplet = solve_bal_linear(h)
    diff = max(
        (root.A - other.A).norm() / max(1, root.A.norm()),
        (root.B - other.B).norm() / max(1, root.B.norm()),
        (root.C - other.C).norm() / max(1, root.C.norm()),
    )
    return diff <= tau() * 2**16, {"max_difference": float(diff)}


def run(job: Job, args: argparse.Namespace) -> int:
    tree = build_tree(job)
    h = tree.element
    root = tree.root
    order = job.resolved_order()
    sweep = _Sweep()
    generic = root.irregular in (None, "eps_inf")

    chain = chain_verify(tree, order)
    sweep.run("chain", lambda: (chain.passed, {"max_residual": chain.max_residual}))
    if generic:
        sweep.run("bal_uniqueness", lambda: _uniqueness(tree))

    for path in sorted({regular_prefix(tree, p) for p in tree.maximal_paths()}):
        key = path_key(path) or "root"
        states = tree.path_states(path)
        if generic:
            sweep.run(f"reconstruct[{key}]", lambda: _reconstruct(tree, path, order))
            for name, fn in (("edge_relations", edge_relations), ("viete", viete_checks)):
                sweep.run(f"{name}[{key}]", lambda fn=fn: _relation(fn(h, states)))
            if h.genus == 1:
                sweep.run(f"normal_form_g1[{key}]", lambda: _relation(normal_form_g1(h, states)))
            elif h.genus == 2:
                sweep.run(f"normal_form_g2[{key}]", lambda: _relation(normal_form_g2(h, states)))
        sweep.run(f"symmetry[{key}]", lambda: _symmetry(h, tree.path_states(path)))
        if path:
            sweep.run(f"approximation[{key}]", lambda: _approx(tree, path, order))

    sweep.run("ramification", lambda: _ramification(job))
    emit({"checks": sweep.checks, "passed": sweep.passed}, args)
    return sweep.exit_code


def _reconstruct(tree, path, order) -> tuple:
    res = reconstruct_series(tree, path, order)
    return res <= tau(), {"residual": float(res)}


def _relation(report) -> tuple:
    return report.passed, {"findings": report.findings}


def _symmetry(h, states) -> tuple:
    report = detect(h, states)
    algebra = symmetry_algebra_check(report)
    return algebra.passed, {
        "period": report.periodic,
        "even_centers": report.even_centers,
        "odd_centers": report.odd_centers,
    }


def _approx(tree, path, order) -> tuple:
    rep = approximation_report(tree, path, order)
    return rep.passed, {"failed": [c.theorem for c in rep.clauses if c.required and not c.passed], "findings": rep.findings}


def _ramification(job: Job) -> tuple:
    curve = Curve.of(job.poly_s(), job.resolved_genus())
    summary = ramification(curve).summary(curve.genus)
    return summary["consistent"], {"deg_R_e": summary["deg_R_e"], "deg_R_or": summary["deg_R_or"]}


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run every applicable identity check on the job")
    add_common(parser)
    parser.set_defaults(handler=run)
