"""Residuals of the Guichard condition and of Lame's system on sample grids.

First-order system in h_ij = l_{i,x_j} / l_j (distinct i, j, k; eps = (1, -1, 1)):

    (A) sum_s eps_s l_s^2
    (B) l_{i,x_j} - h_ij l_j
    (C) eps_i l_{i,x_i} + eps_j h_ji l_j + eps_k h_ki l_k
    (D) h_{ij,x_k} - h_ik h_kj
    (E) h_{ij,x_j} + h_{ji,x_i} + h_ik h_jk
    (F) eps_i h_{ij,x_i} + eps_j h_{ji,x_j} + eps_k h_ki h_kj

Second-order (original) system:

    (L1) l_{i,x_j x_k} - l_{i,x_j} l_{j,x_k} / l_j - l_{i,x_k} l_{k,x_j} / l_k
    (L2) (l_{i,x_j} / l_j)_{,x_j} + (l_{j,x_i} / l_i)_{,x_i} + l_{i,x_k} l_{j,x_k} / l_k^2
"""
from __future__ import annotations

import logging
from itertools import permutations
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.config import settings
from ..core.errors import DomainError, SingularityError
from ..core.monitoring import get_monitor
from .net import EPSILON, GuichardNet, guard_singularity

logger = logging.getLogger(__name__)

FIRST_ORDER_FAMILIES = ("A", "B", "C", "D", "E", "F")
SECOND_ORDER_FAMILIES = ("L1", "L2")
TRIPLES = tuple(permutations(range(3)))


class FamilyResidual(BaseModel):
    """Max/mean absolute residual of one equation family over a grid."""

    model_config = ConfigDict(populate_by_name=True)

    family: str
    max_abs: float
    mean_abs: float
    worst_point: list[float]
    worst_indices: Optional[list[int]] = None
    passed: bool = Field(alias="pass")


class ResidualReport(BaseModel):
    """Per-family residuals with pass/fail against one tolerance."""

    model_config = ConfigDict(populate_by_name=True)

    kind: str
    tolerance: float
    entries: list[FamilyResidual]
    passed: bool = Field(alias="pass")
    points: int = 0

    def entry(self, family: str) -> FamilyResidual:
        for e in self.entries:
            if e.family == family:
                return e
        raise KeyError(family)

    def to_json_dict(self) -> dict:
        # 1-based indices in serialized output
        data = self.model_dump(by_alias=True)
        for e in data["entries"]:
            if e.get("worst_indices") is not None:
                e["worst_indices"] = [i + 1 for i in e["worst_indices"]]
        return data


def guichard_residual(net: GuichardNet, p: Sequence[float]) -> float:
    """l1^2 - l2^2 + l3^2 at ``p``."""
    l = net.l(p)
    return float(np.dot(EPSILON, l * l))


def h_from_l(net: GuichardNet, p: Sequence[float]) -> np.ndarray:
    """h[i][j] = dl[i][j] / l[j] for i != j; the diagonal is zero.

    Raises:
        SingularityError: when some |l_j| is below the singularity guard
    """
    l, dl = net.evaluate(p)
    return _h(l, dl)


def _h(l: np.ndarray, dl: np.ndarray) -> np.ndarray:
    h = dl / l[np.newaxis, :]
    np.fill_diagonal(h, 0.0)
    return h


def central_difference(fn: Callable[[np.ndarray], np.ndarray], p: np.ndarray, steps: np.ndarray, richardson: bool) -> np.ndarray:
    """Derivatives of an array-valued ``fn`` along every axis; result[..., k] = d fn / dx_k."""
    out = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = steps[k]
        d = (fn(p + e) - fn(p - e)) / (2.0 * steps[k])
        if richardson:
            d_half = (fn(p + e / 2) - fn(p - e / 2)) / steps[k]
            d = (4.0 * d_half - d) / 3.0
        out.append(d)
    return np.stack(out, axis=-1)


def _second_difference(net: GuichardNet, p: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Composed central stencils on l: pure (l(+) - 2l + l(-)) / s^2 and the four-point mixed one."""
    def l_at(q: np.ndarray) -> np.ndarray:
        return np.asarray(net.l_fn(q), dtype=float)

    l0 = l_at(p)
    d2 = np.empty((3, 3, 3))
    for j in range(3):
        ej = np.zeros(3)
        ej[j] = steps[j]
        d2[:, j, j] = (l_at(p + ej) - 2.0 * l0 + l_at(p - ej)) / steps[j] ** 2
        for k in range(j + 1, 3):
            ek = np.zeros(3)
            ek[k] = steps[k]
            mixed = (l_at(p + ej + ek) - l_at(p + ej - ek) - l_at(p - ej + ek) + l_at(p - ej - ek)) / (4.0 * steps[j] * steps[k])
            d2[:, j, k] = mixed
            d2[:, k, j] = mixed
    return d2


def second_derivatives(net: GuichardNet, p: np.ndarray) -> np.ndarray:
    """d2l[i][j][k] = d^2 l_i / dx_j dx_k, Richardson-extrapolated.

    Exact nets difference the exact dl with the second-order step. Finite-difference
    nets compose the central differences on l itself in one stencil at
    ``settings.HESSIAN_REL_STEP``; dl is never differenced again there.
    """
    if net.derivative_mode.kind == "exact":
        return central_difference(net.raw_dl, p, net.fd_steps(settings.SECOND_ORDER_REL_STEP), richardson=True)
    steps = net.fd_steps(settings.HESSIAN_REL_STEP)
    return (4.0 * _second_difference(net, p, steps / 2.0) - _second_difference(net, p, steps)) / 3.0


def h_derivatives(net: GuichardNet, p: np.ndarray) -> np.ndarray:
    """dh[i][j][k] = d h_ij / d x_k by the quotient rule on ``second_derivatives``.

    h_ij,k = l_i,jk / l_j - l_i,j l_j,k / l_j^2; the diagonal i = j is zero.
    """
    l = np.asarray(net.l_fn(p), dtype=float)
    guard_singularity(l, p)
    dl = net.raw_dl(p)
    d2l = second_derivatives(net, p)
    dh = d2l / l[np.newaxis, :, np.newaxis] - dl[:, :, np.newaxis] * dl[np.newaxis, :, :] / (l ** 2)[np.newaxis, :, np.newaxis]
    for i in range(3):
        dh[i, i, :] = 0.0
    return dh


def default_first_order_tol(net: GuichardNet) -> float:
    """``FIRST_ORDER_TOL`` for exact nets, ``FD_FIRST_ORDER_TOL`` for finite-difference ones."""
    if net.derivative_mode.kind == "exact":
        return settings.FIRST_ORDER_TOL
    return settings.FD_FIRST_ORDER_TOL


def first_order_instances(l: np.ndarray, dl: np.ndarray, dh: np.ndarray) -> dict[tuple[str, tuple[int, int, int]], float]:
    """Every instance of (A)-(F) at one point, keyed by (family, (i, j, k)).

    (A) is keyed by the identity triple only.
    """
    h = _h(l, dl)
    eps = EPSILON
    out: dict[tuple[str, tuple[int, int, int]], float] = {("A", (0, 1, 2)): float(np.dot(eps, l * l))}
    for i, j, k in TRIPLES:
        t = (i, j, k)
        out[("B", t)] = dl[i, j] - h[i, j] * l[j]
        out[("C", t)] = eps[i] * dl[i, i] + eps[j] * h[j, i] * l[j] + eps[k] * h[k, i] * l[k]
        out[("D", t)] = dh[i, j, k] - h[i, k] * h[k, j]
        out[("E", t)] = dh[i, j, j] + dh[j, i, i] + h[i, k] * h[j, k]
        out[("F", t)] = eps[i] * dh[i, j, i] + eps[j] * dh[j, i, j] + eps[k] * h[k, i] * h[k, j]
    return out


def second_order_instances(l: np.ndarray, dl: np.ndarray, d2l: np.ndarray) -> dict[tuple[str, tuple[int, int, int]], float]:
    """Every instance of (L1), (L2) at one point; d2l[i][j][k] = d^2 l_i / dx_j dx_k."""
    out: dict[tuple[str, tuple[int, int, int]], float] = {}
    for i, j, k in TRIPLES:
        out[("L1", (i, j, k))] = d2l[i, j, k] - dl[i, j] * dl[j, k] / l[j] - dl[i, k] * dl[k, j] / l[k]
        # (l_{i,x_j} / l_j)_{,x_j} expanded by the quotient rule
        hij_j = d2l[i, j, j] / l[j] - dl[i, j] * dl[j, j] / l[j] ** 2
        hji_i = d2l[j, i, i] / l[i] - dl[j, i] * dl[i, i] / l[i] ** 2
        out[("L2", (i, j, k))] = hij_j + hji_i + dl[i, k] * dl[j, k] / l[k] ** 2
    return out


def _collect(
    net: GuichardNet,
    grid: np.ndarray,
    tol: float,
    kind: str,
    families: Sequence[str],
    point_fn: Callable[[np.ndarray], dict],
) -> ResidualReport:
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.shape[0] == 0:
        raise DomainError("Residual grid is empty")
    for p in grid:
        if not net.domain.contains(p):
            raise DomainError(f"Grid point {p.tolist()} lies outside the net domain", p.tolist())

    worst = {f: (-1.0, None, None) for f in families}
    sums = {f: 0.0 for f in families}
    counts = {f: 0 for f in families}
    with get_monitor().measure(f"residuals.{kind}"):
        for p in grid:
            try:
                values = point_fn(p)
            except SingularityError as e:
                if e.point is None:
                    e.point = tuple(p.tolist())
                raise
            for (fam, idx), value in values.items():
                a = abs(float(value))
                if not np.isfinite(a):
                    raise SingularityError(f"Non-finite {fam} residual at x = {p.tolist()}", point=p)
                sums[fam] += a
                counts[fam] += 1
                if a > worst[fam][0]:
                    worst[fam] = (a, p, idx)

    entries = []
    for fam in families:
        max_abs, wp, idx = worst[fam]
        entries.append(
            FamilyResidual(
                family=fam,
                max_abs=max_abs,
                mean_abs=sums[fam] / max(counts[fam], 1),
                worst_point=[float(v) for v in wp],
                worst_indices=list(idx),
                passed=max_abs <= tol,
            )
        )
    report = ResidualReport(
        kind=kind,
        tolerance=tol,
        entries=entries,
        passed=all(e.passed for e in entries),
        points=int(grid.shape[0]),
    )
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level,
        f"{kind} residuals on {net.family} net: "
        + ", ".join(f"{e.family}={e.max_abs:.2e}" for e in entries)
        + f" (tol {tol:g}, {'pass' if report.passed else 'FAIL'})",
    )
    return report


def first_order_residuals(net: GuichardNet, grid: Optional[np.ndarray] = None, tol: Optional[float] = None) -> ResidualReport:
    """Evaluate (A)-(F) over every distinct index triple at every grid point.

    Args:
        net: Net to verify
        grid: Points (N, 3) inside the domain; default is the inset uniform grid
        tol: Pass threshold on max_abs (default from ``default_first_order_tol``)

    Returns:
        ResidualReport with one entry per family
    """
    grid = net.domain.grid() if grid is None else grid
    tol = default_first_order_tol(net) if tol is None else tol

    def at(p: np.ndarray) -> dict:
        l, dl = net.evaluate(p)
        return first_order_instances(l, dl, h_derivatives(net, p))

    return _collect(net, grid, tol, "first_order", FIRST_ORDER_FAMILIES, at)


def second_order_residuals(net: GuichardNet, grid: Optional[np.ndarray] = None, tol: Optional[float] = None) -> ResidualReport:
    """Evaluate the original second-order Lame equations on ``second_derivatives``."""
    grid = net.domain.grid() if grid is None else grid
    tol = settings.SECOND_ORDER_TOL if tol is None else tol

    def at(p: np.ndarray) -> dict:
        l, dl = net.evaluate(p)
        values = second_order_instances(l, dl, second_derivatives(net, p))
        values[("A", (0, 1, 2))] = float(np.dot(EPSILON, l * l))
        return values

    return _collect(net, grid, tol, "second_order", ("A",) + SECOND_ORDER_FAMILIES, at)
