"""Infinitesimal symmetry check of Lame's first-order system and the numeric group-action test.

A field V is a symmetry when pr V (Delta) vanishes on solutions for every equation Delta of
the system; on solutions is decided exactly by ``on_shell_reduce``.
"""
from __future__ import annotations

import logging
from itertools import permutations
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, model_validator

from ..core.errors import ConstraintError
from ..core.monitoring import get_monitor
from ..lame.net import GuichardNet, dilate_l, dilate_x, translate
from ..lame.residuals import ResidualReport, first_order_residuals
from .expression import Polynomial
from .jet import EPS, h, h_x, l, l_x
from .prolongation import ProlongedField, VectorFieldAnsatz, builtin_generator, prolong_first
from .reduction import on_shell_reduce

logger = logging.getLogger(__name__)

FAMILIES = ("A", "B", "C", "D", "E", "F")
Triple = tuple[int, int, int]


def equation(family: str, i: int, j: int, k: int) -> Polynomial:
    """The (A)-(F) expression for 1-based distinct indices i, j, k."""
    if family == "A":
        return sum((EPS[s] * l(s) ** 2 for s in (1, 2, 3)), Polynomial())
    if family == "B":
        return l_x(i, j) - h(i, j) * l(j)
    if family == "C":
        return EPS[i] * l_x(i, i) + EPS[j] * h(j, i) * l(j) + EPS[k] * h(k, i) * l(k)
    if family == "D":
        return h_x(i, j, k) - h(i, k) * h(k, j)
    if family == "E":
        return h_x(i, j, j) + h_x(j, i, i) + h(i, k) * h(j, k)
    if family == "F":
        return EPS[i] * h_x(i, j, i) + EPS[j] * h_x(j, i, j) + EPS[k] * h(k, i) * h(k, j)
    raise ValueError(f"unknown equation family {family!r}")


def equation_instances() -> list[tuple[str, Triple, Polynomial]]:
    """(A) once, (B)-(F) over every ordered triple of distinct indices."""
    out = [("A", (1, 2, 3), equation("A", 1, 2, 3))]
    for family in FAMILIES[1:]:
        for t in permutations((1, 2, 3)):
            out.append((family, t, equation(family, *t)))
    return out


class InstanceResult(BaseModel):
    family: str
    indices: list[int]
    reduced: str
    zero: bool


class SymmetryReport(BaseModel):
    """Per-instance reduced residuals of pr V applied to the system."""

    generator: str
    instances: list[InstanceResult]

    @property
    def families(self) -> dict[str, bool]:
        """Family -> every instance reduced to zero."""
        return {f: all(r.zero for r in self.instances if r.family == f) for f in FAMILIES}

    @property
    def passed(self) -> bool:
        return all(r.zero for r in self.instances)

    def failing(self) -> list[InstanceResult]:
        return [r for r in self.instances if not r.zero]

    def to_json_dict(self) -> dict:
        return {
            "generator": self.generator,
            "pass": self.passed,
            "families": self.families,
            "instances": [r.model_dump() for r in self.instances],
        }


def verify_instance(pr: ProlongedField, family: str, indices: Triple, expr: Polynomial) -> InstanceResult:
    reduced = on_shell_reduce(pr.apply(expr))
    return InstanceResult(family=family, indices=list(indices), reduced=str(reduced), zero=reduced.is_zero())


def summarize(v: VectorFieldAnsatz, results: list[InstanceResult]) -> SymmetryReport:
    report = SymmetryReport(generator=v.name, instances=results)
    if report.passed:
        logger.info(f"{v.name} field annihilates all {len(results)} equation instances")
    else:
        bad = sorted({r.family for r in report.failing()})
        logger.warning(f"{v.name} field leaves nonzero residuals in families {', '.join(bad)}")
    return report


def verify_generator(v: Optional[VectorFieldAnsatz] = None) -> SymmetryReport:
    """Apply pr V to every instance of (A)-(F), reduce on-shell and report which vanish.

    Args:
        v: Field to check (default: the built-in generator with symbolic parameters)
    """
    v = builtin_generator() if v is None else v
    with get_monitor().measure("symmetry.verify"):
        pr = prolong_first(v)
        results = [verify_instance(pr, fam, t, expr) for fam, t, expr in equation_instances()]
    return summarize(v, results)


class GroupAction(BaseModel):
    """One group element: x -> x + v, x -> s x, or l -> rho l."""

    kind: Literal["translate", "dilate_x", "dilate_l"]
    vector: Optional[tuple[float, float, float]] = None
    factor: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "translate":
            if self.vector is None:
                raise ValueError("translate needs a vector of three components")
        elif self.factor is None or self.factor == 0:
            raise ValueError(f"{self.kind} needs a nonzero factor")
        return self

    def apply(self, net: GuichardNet) -> GuichardNet:
        if self.kind == "translate":
            return translate(net, self.vector)
        if self.kind == "dilate_x":
            return dilate_x(net, self.factor)
        return dilate_l(net, self.factor)

    def label(self) -> str:
        return f"translate{list(self.vector)}" if self.kind == "translate" else f"{self.kind}({self.factor:g})"


def group_action_test(
    net: GuichardNet,
    action: GroupAction,
    grid: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    counts: Optional[Sequence[int]] = None,
) -> ResidualReport:
    """First-order residuals of the transformed net on its own (transformed) grid.

    Without ``grid`` the image domain is sampled with ``counts`` points per axis.

    Raises:
        ConstraintError: zero dilation factor
    """
    if action.kind != "translate" and not action.factor:
        raise ConstraintError(f"{action.kind} factor must be nonzero")
    image = action.apply(net)
    logger.info(f"Group action {action.label()} on {net.family} net")
    grid = image.domain.grid(counts) if grid is None else grid
    report = first_order_residuals(image, grid=grid, tol=tol)
    return report.model_copy(update={"kind": f"group_action:{action.kind}"})
