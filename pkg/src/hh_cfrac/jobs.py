"""Job files: one JSON document describing an element and what to do with it."""

from __future__ import annotations

import json
from pathlib import Path as FsPath
from typing import List, Literal, Optional, Union

from mpmath import mp
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .arith import Poly, parse_scalar, recenter
from .bal import genus_of, make_element
from .cfengine import BranchTree, expand
from .config import settings
from .errors import MalformedInput
from .irregular import expand_eps_infinity, expand_t_infinity, expand_t_zero
from .log_utils import get_logger

log = get_logger(__name__)

INFINITY = ("infinity", "inf")


class Job(BaseModel):
    model_config = ConfigDict(extra="forbid")

    X: List[str] = Field(..., min_length=5, description="Coefficients of X in x, ascending powers")
    variable_center: str = Field("0", description="Expansion centre epsilon, or 'infinity'")
    y: str = Field(..., description="Point y, 'infinity' or 'center'")
    genus: Optional[int] = Field(None, ge=1)
    depth: int = Field(4, ge=0)
    policy: Union[Literal["all", "first"], List[int]] = "all"
    precision_bits: int = Field(default_factory=lambda: settings.PRECISION_BITS, ge=53)
    order: Optional[int] = Field(None, ge=1)
    sqrtY_branch: Literal["principal", "negative"] = "principal"

    # curve and growth
    point_x: Optional[str] = None
    point_branch: Literal["principal", "negative"] = "principal"
    start_lambda: Optional[str] = None
    # convergents
    candidates: Optional[List[str]] = None

    @field_validator("X")
    @classmethod
    def _coefficients_parse(cls, v: List[str]) -> List[str]:
        for c in v:
            parse_scalar(c)
        return v

    @model_validator(mode="after")
    def _genus_matches(self) -> "Job":
        n = len(self.X) - 1
        if n % 2:
            raise ValueError(f"X must have even nominal degree, got {n}")
        if self.genus is not None and self.genus != (n - 2) // 2:
            raise ValueError(f"genus {self.genus} does not match degree {n}")
        return self

    @property
    def branch(self) -> int:
        return -1 if self.sqrtY_branch == "negative" else 1

    @property
    def center_at_infinity(self) -> bool:
        return self.variable_center.strip().lower() in INFINITY

    def poly_x(self) -> Poly:
        return Poly(tuple(parse_scalar(c) for c in self.X))

    def epsilon(self):
        if self.center_at_infinity:
            return mp.mpc(mp.inf)
        return parse_scalar(self.variable_center)

    def poly_s(self) -> Poly:
        """X in the local variable s = x - epsilon."""
        if self.center_at_infinity:
            return Poly(tuple(reversed(self.poly_x().coeffs)))
        return recenter(self.poly_x(), self.epsilon())

    def resolved_genus(self) -> int:
        return self.genus if self.genus is not None else genus_of(self.poly_x())

    def resolved_order(self) -> int:
        g = self.resolved_genus()
        return self.order or (g + 1) * (self.depth + 2) + settings.DEFAULT_ORDER_SLACK


def load_job(path: Union[str, FsPath]) -> Job:
    try:
        raw = json.loads(FsPath(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read job file: {exc}") from exc
    return parse_job(raw)


def parse_job(raw: object) -> Job:
    try:
        return Job.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "job"
        raise MalformedInput(f"{where}: {first.get('msg')}", errors=exc.error_count()) from exc


def build_tree(job: Job) -> BranchTree:
    """Expansion selected by the centre and y fields."""
    g = job.resolved_genus()
    policy = job.policy
    y_text = job.y.strip().lower()
    if job.center_at_infinity:
        if y_text in INFINITY or y_text == "center":
            raise MalformedInput("with the centre at infinity y must be a finite scalar")
        return expand_eps_infinity(job.poly_x(), parse_scalar(job.y), job.depth, policy, branch=job.branch, genus=g)
    X = job.poly_s()
    if y_text in INFINITY:
        return expand_t_infinity(X, job.depth, policy, genus=g)
    if y_text == "center":
        return expand_t_zero(X, job.depth, policy, genus=g)
    h = make_element(job.poly_x(), job.epsilon(), parse_scalar(job.y), genus=g, branch=job.branch)
    log.debug("element built", code="Job", genus=g, depth=job.depth)
    return expand(h, job.depth, policy)


def element_for(job: Job):
    """The regular element of a job with finite centre and finite y."""
    return make_element(job.poly_x(), job.epsilon(), parse_scalar(job.y), genus=job.resolved_genus(), branch=job.branch)

