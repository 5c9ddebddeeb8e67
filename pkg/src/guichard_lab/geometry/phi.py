"""The angle phi of the cos/cosh presentation of a net, its ODEs and the cyclicity test.

cos form:   l1 = l2 cos phi,  l3 = l2 sin phi         (phi = atan2(l3, l1))
cosh forms: l1 = l2 tanh phi  (l1 = lam sinh, l2 = lam cosh), or l3 = l2 tanh phi

On the elliptic family phi_xi l2 = c is constant, phi_xi^2 = c (c2 cos^2 phi - c1) and
phi_xixi = -(c c2 / 2) sin 2 phi.
"""
from __future__ import annotations

import logging
import math
from itertools import combinations
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..core.config import settings
from ..core.errors import DegenerateSolutionError, DomainError, UnsupportedNetError
from ..lame.net import GuichardNet, TranslationInvariant
from ..lame.residuals import FamilyResidual, ResidualReport

logger = logging.getLogger(__name__)

PhiForm = Literal["cos_type", "cosh_type", "cosh_type_13"]


def phi_from_l(l: np.ndarray, form: PhiForm = "cos_type") -> float:
    if form == "cos_type":
        return math.atan2(l[2], l[0])
    ratio = (l[0] if form == "cosh_type" else l[2]) / l[1]
    if abs(ratio) >= 1.0:
        raise DomainError(f"{form}: |ratio| = {abs(ratio):.6g} must be < 1 for artanh", ratio)
    return math.atanh(ratio)


def phi_recover(net: GuichardNet, p: Sequence[float], form: PhiForm = "cos_type") -> float:
    """phi at ``p`` from the metric coefficients.

    ``cos_type`` gives atan2(l3, l1), ``cosh_type`` artanh(l1 / l2) and ``cosh_type_13``
    artanh(l3 / l2).
    """
    return phi_from_l(net.l(p), form)


def phi_along_xi(net: GuichardNet, xis: Sequence[float], form: PhiForm = "cos_type") -> np.ndarray:
    """phi on increasing xi samples, unwrapped for continuity from the middle sample."""
    inv = _translation(net)
    xis = np.asarray(xis, dtype=float)
    raw = np.array([phi_from_l(inv.profile(float(x))[0], form) for x in xis])
    if form != "cos_type" or raw.size < 2:
        return raw
    mid = raw.size // 2
    right = np.unwrap(raw[mid:])
    left = np.unwrap(raw[: mid + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


def _translation(net: GuichardNet) -> TranslationInvariant:
    if not isinstance(net.invariant, TranslationInvariant):
        raise UnsupportedNetError(f"{net.family} net has no translation invariant xi")
    return net.invariant


def _elliptic(net: GuichardNet) -> TranslationInvariant:
    inv = _translation(net)
    if net.family != "translation" or "c" not in net.params:
        raise UnsupportedNetError("phi ODEs need a net of the elliptic translation family")
    return inv


def _phi_derivatives(inv: TranslationInvariant, xi: float, h: float) -> tuple[float, float, float, float]:
    """(phi, phi_xi, phi_xixi, l2) at xi; phi_xi by the chain rule, phi_xixi by differences of it."""

    def first(x: float) -> tuple[float, float, np.ndarray]:
        l, lp = inv.profile(x)
        return math.atan2(l[2], l[0]), (l[0] * lp[2] - l[2] * lp[0]) / (l[0] ** 2 + l[2] ** 2), l

    phi, dphi, l = first(xi)
    d2 = (first(xi + h)[1] - first(xi - h)[1]) / (2.0 * h)
    return phi, dphi, d2, float(l[1])


def _default_samples(inv: TranslationInvariant, count: int = 41) -> np.ndarray:
    lo, hi = inv.xi_range
    pad = settings.GRID_INSET * (hi - lo)
    return np.linspace(lo + pad, hi - pad, count)


def _phi_table(net: GuichardNet, xi_samples: Optional[Sequence[float]]) -> np.ndarray:
    inv = _elliptic(net)
    xis = _default_samples(inv) if xi_samples is None else np.asarray(xi_samples, dtype=float)
    lo, hi = inv.xi_range
    h = settings.FD_REL_STEP * (hi - lo)
    rows = np.array([(x, *_phi_derivatives(inv, float(x), h)) for x in xis])
    if np.all(np.abs(rows[:, 2]) < 1e-12):
        raise DegenerateSolutionError("phi is constant along xi")
    return rows


def phi_ode_residuals(net: GuichardNet, xi_samples: Optional[Sequence[float]] = None, tol: Optional[float] = None) -> ResidualReport:
    """Deviations of phi_xi l2 = c, phi_xi^2 = c (c2 cos^2 phi - c1) and
    phi_xixi = -(c c2 / 2) sin 2phi along xi, with c read off the first relation."""
    tol = settings.PHI_TOL if tol is None else tol
    rows = _phi_table(net, xi_samples)
    xis, phi, dphi, d2phi, l2 = rows.T
    c1, c2, _ = net.params["c"]

    products = dphi * l2
    c = float(products.mean())
    residuals = {
        "phi_l2": np.abs(products - c),
        "phi_squared": np.abs(dphi**2 - c * (c2 * np.cos(phi) ** 2 - c1)),
        "phi_second": np.abs(d2phi + 0.5 * c * c2 * np.sin(2.0 * phi)),
    }
    entries = []
    inv = net.invariant
    for name, values in residuals.items():
        worst = int(np.argmax(values))
        # representative point of the worst level surface
        point = inv.alpha * (xis[worst] - inv.offset) / float(inv.alpha @ inv.alpha)
        entries.append(
            FamilyResidual(
                family=name,
                max_abs=float(values[worst]),
                mean_abs=float(values.mean()),
                worst_point=[float(v) for v in point],
                passed=bool(values[worst] <= tol),
            )
        )
    report = ResidualReport(kind="phi_ode", tolerance=tol, entries=entries, passed=all(e.passed for e in entries), points=len(xis))
    logger.info(f"phi ODE check: c = {c:.12g}, " + ", ".join(f"{e.family}={e.max_abs:.2e}" for e in entries))
    return report


def fit_phi_coefficients(net: GuichardNet, xi_samples: Optional[Sequence[float]] = None) -> dict[str, float]:
    """Least-squares fit of phi_xi^2 = c (a cos^2 phi - b); returns {"c", "a", "b"}."""
    rows = _phi_table(net, xi_samples)
    _, phi, dphi, _, l2 = rows.T
    c = float(np.mean(dphi * l2))
    design = np.column_stack([np.cos(phi) ** 2, np.ones_like(phi)])
    (slope, intercept), *_ = np.linalg.lstsq(design, dphi**2, rcond=None)
    return {"c": c, "a": float(slope / c), "b": float(-intercept / c)}


class PairCyclicity(BaseModel):
    pair: tuple[int, int]
    max_abs: float
    vanishes: bool


# Cyclic nets: phi_x1x2 = phi_x2x3 = 0 for the cos metric, phi_x1x3 = phi_x2x3 = 0 for the cosh ones
CRITERION_PAIRS: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "cos_type": ((1, 2), (2, 3)),
    "cosh_type": ((1, 3), (2, 3)),
    "cosh_type_13": ((1, 3), (2, 3)),
}


class CyclicityReport(BaseModel):
    """Mixed partials of phi for every coordinate pair (1-based) and the resulting label.

    All three pairs are reported. Only the two ``criterion_pairs`` of the metric form
    decide ``classification``: ``cyclic_compatible`` when both vanish, ``non_cyclic``
    when both are nonzero, ``mixed`` otherwise and None when no claim is made. The
    remaining pair is not part of the cyclic condition, so a nonzero value there
    (e.g. phi(x1 + x3) in case b2) leaves the label unchanged; ``note`` says so.
    """

    pairs: list[PairCyclicity]
    classification: Optional[Literal["cyclic_compatible", "non_cyclic", "mixed"]]
    tolerance: float
    form: PhiForm = "cos_type"
    criterion_pairs: list[tuple[int, int]]
    note: str

    def pair(self, i: int, j: int) -> PairCyclicity:
        for p in self.pairs:
            if p.pair == (i, j):
                return p
        raise KeyError((i, j))


def _phi_callable(net: GuichardNet):
    if net.phi_fn is not None:
        return net.phi_fn
    return lambda q: math.atan2(*np.asarray(net.l_fn(q))[[2, 0]])


def mixed_partial(net: GuichardNet, p: np.ndarray, i: int, j: int, steps: np.ndarray) -> float:
    """phi_{x_i x_j} (0-based axes, i != j) by the four-point stencil."""
    phi = _phi_callable(net)
    ei = np.zeros(3)
    ej = np.zeros(3)
    ei[i] = steps[i]
    ej[j] = steps[j]
    return (phi(p + ei + ej) - phi(p + ei - ej) - phi(p - ei + ej) + phi(p - ei - ej)) / (4.0 * steps[i] * steps[j])


def cyclicity_check(
    net: GuichardNet,
    grid: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    form: PhiForm = "cos_type",
) -> CyclicityReport:
    """Whether each mixed partial of phi vanishes on the grid.

    The label uses the two pairs of ``CRITERION_PAIRS[form]``; the third pair is
    reported alongside. Dilation nets get the per-pair report without a classification.
    """
    tol = settings.CYCLIC_TOL if tol is None else tol
    grid = net.domain.grid(5) if grid is None else np.atleast_2d(grid)
    steps = net.fd_steps(settings.CYCLIC_REL_STEP)
    pairs = []
    for i, j in combinations(range(3), 2):
        worst = max(abs(mixed_partial(net, np.asarray(p, dtype=float), i, j, steps)) for p in grid)
        pairs.append(PairCyclicity(pair=(i + 1, j + 1), max_abs=float(worst), vanishes=bool(worst < tol)))

    criterion = CRITERION_PAIRS[form]
    (a, b), (c, d) = criterion
    other = next(p.pair for p in pairs if p.pair not in criterion)
    classification = None
    if net.family == "dilation":
        note = "dilation nets are reported without a classification"
    else:
        v1 = next(p for p in pairs if p.pair == criterion[0]).vanishes
        v2 = next(p for p in pairs if p.pair == criterion[1]).vanishes
        if v1 and v2:
            classification = "cyclic_compatible"
        elif not v1 and not v2:
            classification = "non_cyclic"
        else:
            classification = "mixed"
        note = (
            f"cyclic nets of the {form} metric have phi_x{a}x{b} = phi_x{c}x{d} = 0; "
            f"pair {other} is reported but does not enter the classification"
        )
    report = CyclicityReport(
        pairs=pairs,
        classification=classification,
        tolerance=tol,
        form=form,
        criterion_pairs=list(criterion),
        note=note,
    )
    logger.info(f"Cyclicity of {net.family} net: {classification or 'report only'}")
    return report
