"""Translation-invariant (elliptic) family: l_i functions of xi = alpha . x.

The profile solves l1' = c1 l2 l3, l2' = c2 l1 l3, l3' = c3 l1 l2 with
c1 - c2 + c3 = 0 and alpha1^2 c2 c3 + alpha2^2 c1 c3 + alpha3^2 c1 c2 = 0. Along it
I12 = c2 l1^2 - c1 l2^2, I13 = c3 l1^2 - c1 l3^2 and I23 = c3 l2^2 - c2 l3^2 all equal lambda.

Closed form for l1: with y = l1^2, A = c2 c3, p = lambda / c2, q = lambda / c3,

    y'^2 = 4 A y (y - p)(y - q).

Sort the roots {0, p, q} as r1 <= r2 <= r3. Two bounded branches are covered:

    A > 0, y(0) in [r1, r2]:  y = r1 + (r2 - r1) sn^2(u, k),  k^2 = (r2 - r1) / (r3 - r1)
    A < 0, y(0) in [r2, r3]:  y = r3 - (r3 - r2) sn^2(u, k),  k^2 = (r3 - r2) / (r3 - r1)

with u = u0 +/- omega xi, omega = sqrt(|A| (r3 - r1)) and u0 in [0, K(k)] from the
initial value. lambda = 0 gives the rational solution l1 = l1(0) / (1 - s sqrt(A) l1(0) xi),
s = sign(c1).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import CubicHermiteSpline

from ..core.config import settings
from ..core.errors import (
    ConstraintError,
    DegenerateSolutionError,
    DomainError,
    DomainShrunkError,
    UnsupportedRegimeError,
)
from ..core.monitoring import get_monitor
from ..lame.net import Box, GuichardNet, TranslationInvariant
from ..special.elliptic import complete_K, inverse_sn, jacobi_scd

logger = logging.getLogger(__name__)

# |l_i| above this is treated as a blow-up edge of the admissible interval
_GROWTH_LIMIT = 1e6


class TranslationConstants(BaseModel):
    """Constants of the elliptic family."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    alpha: tuple[float, float, float]
    c: tuple[float, float, float]
    lambda_: float = Field(alias="lambda")
    l1_0: float = Field(gt=0)
    sign_l1prime: Optional[Literal[-1, 1]] = None

    def violations(self) -> list[str]:
        """Every violated defining relation, as readable strings."""
        c1, c2, c3 = self.c
        a1, a2, a3 = self.alpha
        out = []
        if any(ci == 0 for ci in self.c):
            out.append(f"c must be nonzero, got {list(self.c)}")
            return out
        scale = abs(c1) + abs(c2) + abs(c3)
        if abs(c1 - c2 + c3) > 1e-12 * scale:
            out.append(f"c1 - c2 + c3 = {c1 - c2 + c3:.6g} != 0")
        terms = (a1 * a1 * c2 * c3, a2 * a2 * c1 * c3, a3 * a3 * c1 * c2)
        if abs(sum(terms)) > 1e-10 * max(sum(abs(t) for t in terms), 1e-300):
            out.append(f"alpha1^2 c2 c3 + alpha2^2 c1 c3 + alpha3^2 c1 c2 = {sum(terms):.6g} != 0")
        if a1 == a2 == a3 == 0:
            out.append("alpha must not be (0, 0, 0)")
        y0 = self.l1_0**2
        l2sq = (c2 * y0 - self.lambda_) / c1
        l3sq = (c3 * y0 - self.lambda_) / c1
        if l2sq <= 0:
            out.append(f"l2(0)^2 = (c2/c1)(l1(0)^2 - lambda/c2) = {l2sq:.6g} must be > 0")
        if l3sq <= 0:
            out.append(f"l3(0)^2 = ((c2-c1)/c1)(l1(0)^2 - lambda/(c2-c1)) = {l3sq:.6g} must be > 0")
        if not out and self.sign_l1prime is not None and self.sign_l1prime != int(np.sign(c1)):
            out.append(f"sign_l1prime = {self.sign_l1prime} contradicts l1'(0) = c1 l2(0) l3(0) with sign {int(np.sign(c1))}")
        return out

    def validate_relations(self) -> None:
        errors = self.violations()
        if errors:
            raise ConstraintError(errors)

    def initial_state(self) -> np.ndarray:
        """(l1, l2, l3) at xi = 0 on the positive branch."""
        c1, c2, c3 = self.c
        y0 = self.l1_0**2
        return np.array(
            [self.l1_0, math.sqrt((c2 * y0 - self.lambda_) / c1), math.sqrt((c3 * y0 - self.lambda_) / c1)]
        )

    def rhs(self, l: np.ndarray) -> np.ndarray:
        c = self.c
        return np.array([c[0] * l[1] * l[2], c[1] * l[0] * l[2], c[2] * l[0] * l[1]])

    def quartic_rhs(self, l1: float) -> float:
        """c2 (c2 - c1)(l1^2 - lambda / c2)(l1^2 - lambda / (c2 - c1))."""
        c1, c2, _ = self.c
        y = l1 * l1
        return c2 * (c2 - c1) * (y - self.lambda_ / c2) * (y - self.lambda_ / (c2 - c1))


def _rk4_step(f, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _admissible(l: np.ndarray) -> bool:
    return bool(
        np.all(np.isfinite(l))
        and np.all(l > 0)
        and np.all(l * l >= settings.POSITIVITY_FLOOR)
        and np.all(np.abs(l) <= _GROWTH_LIMIT)
    )


def _integrate(tc: TranslationConstants, xi_end: float, step: float) -> tuple[np.ndarray, np.ndarray, bool]:
    """RK4 from xi = 0 to ``xi_end``; stops at the first inadmissible state.

    Returns:
        (xi nodes, states, stopped_early)
    """
    y = tc.initial_state()
    if xi_end == 0.0:
        return np.array([0.0]), y[np.newaxis, :], False
    n = max(1, int(math.ceil(abs(xi_end) / step)))
    h = xi_end / n
    xis = [0.0]
    states = [y]
    for m in range(1, n + 1):
        y_next = _rk4_step(tc.rhs, y, h)
        if not _admissible(y_next):
            return np.array(xis), np.array(states), True
        y = y_next
        xis.append(m * h)
        states.append(y)
    return np.array(xis), np.array(states), False


@dataclass(frozen=True, eq=False)
class TranslationSolution:
    """Dense xi-table of an integrated elliptic profile."""

    constants: TranslationConstants
    xi: np.ndarray
    l: np.ndarray
    spline: CubicHermiteSpline
    richardson_error: float

    @property
    def xi_range(self) -> tuple[float, float]:
        return float(self.xi[0]), float(self.xi[-1])

    def profile(self, xi: float) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.xi_range
        slack = 1e-12 * max(1.0, hi - lo)
        if not (lo - slack <= xi <= hi + slack):
            raise DomainError(f"xi = {xi} outside the integrated range [{lo}, {hi}]", xi)
        l = np.asarray(self.spline(min(max(xi, lo), hi)), dtype=float)
        return l, self.constants.rhs(l)


def _check_range(xi_range: Sequence[float]) -> tuple[float, float]:
    lo, hi = float(xi_range[0]), float(xi_range[1])
    if not lo <= 0.0 <= hi or lo == hi:
        raise ConstraintError(f"xi_range [{lo}, {hi}] must contain 0 and be nonempty")
    return lo, hi


def admissible_xi_interval(tc: TranslationConstants, xi_range: Sequence[float], step: Optional[float] = None) -> tuple[float, float]:
    """Largest interval around 0 inside ``xi_range`` on which every l_i stays positive.

    Args:
        tc: Family constants (validated)
        xi_range: Requested interval containing 0
        step: RK4 step (default ``settings.RK_STEP``)

    Returns:
        (lo, hi) ending at the last admissible integration nodes
    """
    tc.validate_relations()
    lo, hi = _check_range(xi_range)
    step = settings.RK_STEP if step is None else step
    xs_lo, _, _ = _integrate(tc, lo, step)
    xs_hi, _, _ = _integrate(tc, hi, step)
    return float(xs_lo[-1]), float(xs_hi[-1])


def integrate_translation_profile(
    tc: TranslationConstants,
    xi_range: Sequence[float],
    clip: bool = False,
    step: Optional[float] = None,
) -> TranslationSolution:
    """Integrate the coupled system over ``xi_range`` and tabulate it.

    Raises:
        ConstraintError: constants violate a defining relation
        DomainShrunkError: some l_i reaches zero inside the range and ``clip`` is False
        DegenerateSolutionError: every l_i' vanishes along the trajectory
    """
    tc.validate_relations()
    lo, hi = _check_range(xi_range)
    step = settings.RK_STEP if step is None else step

    with get_monitor().measure("build.translation"):
        xs_lo, ys_lo, cut_lo = _integrate(tc, lo, step)
        xs_hi, ys_hi, cut_hi = _integrate(tc, hi, step)

        if cut_lo or cut_hi:
            admissible = (float(xs_lo[-1]), float(xs_hi[-1]))
            if not clip:
                raise DomainShrunkError(
                    f"l_i reaches zero inside xi_range [{lo}, {hi}]; admissible interval is "
                    f"[{admissible[0]:.10g}, {admissible[1]:.10g}]",
                    admissible,
                )
            logger.warning(f"Clipping xi_range [{lo}, {hi}] to admissible [{admissible[0]:.6g}, {admissible[1]:.6g}]")

        xi = np.concatenate([xs_lo[::-1], xs_hi[1:]])
        states = np.concatenate([ys_lo[::-1], ys_hi[1:]])
        derivs = np.array([tc.rhs(s) for s in states])
        if np.all(np.abs(derivs) < 1e-12):
            raise DegenerateSolutionError("every l_i is constant along the trajectory")

        # Richardson: compare the ends against a run with twice the step
        err = 0.0
        for end, xs, ys in ((xi[0], xs_lo, ys_lo), (xi[-1], xs_hi, ys_hi)):
            if end == 0.0:
                continue
            xs2, ys2, _ = _integrate(tc, end, 2.0 * step)
            if math.isclose(xs2[-1], end, rel_tol=1e-12, abs_tol=1e-15):
                err = max(err, float(np.max(np.abs(ys[-1] - ys2[-1]))) / 15.0)
        if err > 1e-9:
            logger.warning(f"RK4 Richardson error estimate {err:.2e} exceeds 1e-9; reduce RK_STEP")
        else:
            logger.debug(f"RK4 Richardson error estimate {err:.2e}")

        spline = CubicHermiteSpline(xi, states, derivs, axis=0)

    logger.info(f"Integrated elliptic profile on [{xi[0]:.6g}, {xi[-1]:.6g}] with {len(xi)} nodes")
    return TranslationSolution(constants=tc, xi=xi, l=states, spline=spline, richardson_error=err)


def _default_box(alpha: np.ndarray, xi_lo: float, xi_hi: float) -> Box:
    # cube around the point with xi = mid whose xi-image fits in the range
    mid = 0.5 * (xi_lo + xi_hi)
    center = alpha * mid / float(np.dot(alpha, alpha))
    half = 0.45 * (xi_hi - xi_lo) / float(np.sum(np.abs(alpha)))
    return Box(tuple(center - half), tuple(center + half))


def build_translation_family(
    tc: TranslationConstants,
    xi_range: Sequence[float],
    domain: Optional[Box] = None,
    clip: bool = False,
    step: Optional[float] = None,
) -> GuichardNet:
    """Net with l_i(alpha . x) from the integrated profile and exact derivatives.

    Args:
        tc: Family constants
        xi_range: Interval of xi containing 0
        domain: Box in x; default is a cube whose xi-image lies inside the range
        clip: Shrink to the admissible interval instead of raising
        step: RK4 step

    Returns:
        GuichardNet carrying a TranslationInvariant
    """
    solution = integrate_translation_profile(tc, xi_range, clip=clip, step=step)
    alpha = np.asarray(tc.alpha, dtype=float)
    lo, hi = solution.xi_range

    if domain is None:
        domain = _default_box(alpha, lo, hi)
    else:
        image = domain.corners() @ alpha
        if image.min() < lo - 1e-12 or image.max() > hi + 1e-12:
            raise DomainShrunkError(
                f"Box maps to xi in [{image.min():.6g}, {image.max():.6g}], outside [{lo:.6g}, {hi:.6g}]",
                (lo, hi),
            )

    profile = solution.profile

    def l_fn(p: np.ndarray) -> np.ndarray:
        return profile(float(np.dot(alpha, p)))[0]

    def dl_fn(p: np.ndarray) -> np.ndarray:
        return np.outer(profile(float(np.dot(alpha, p)))[1], alpha)

    return GuichardNet(
        domain=domain,
        l_fn=l_fn,
        dl_fn=dl_fn,
        family="translation",
        params={**tc.model_dump(by_alias=True), "xi_range": [lo, hi]},
        invariant=TranslationInvariant(alpha=alpha, profile=profile, xi_range=(lo, hi)),
    )


def _constants_of(net: GuichardNet) -> tuple[float, float, float]:
    if net.family != "translation" or not isinstance(net.invariant, TranslationInvariant):
        raise ConstraintError("conserved quantities need a net from build_translation_family")
    return tuple(net.params["c"])


def conserved_quantities(net: GuichardNet, xi: float) -> tuple[float, float, float]:
    """(I12, I13, I23) = (c2 l1^2 - c1 l2^2, c3 l1^2 - c1 l3^2, c3 l2^2 - c2 l3^2) at ``xi``."""
    c1, c2, c3 = _constants_of(net)
    l, _ = net.invariant.profile(xi)
    y = l * l
    return (c2 * y[0] - c1 * y[1], c3 * y[0] - c1 * y[2], c3 * y[1] - c2 * y[2])


@dataclass(frozen=True)
class EllipticReduction:
    """Parameters of the sn^2 representation of y = l1^2."""

    regime: Literal["lower", "upper", "rational"]
    roots: tuple[float, float, float]
    k: float
    omega: float
    u0: float
    direction: float


def classify_regime(tc: TranslationConstants) -> EllipticReduction:
    """Which closed-form branch describes l1 for these constants.

    Raises:
        UnsupportedRegimeError: y(0) is not on a bounded branch of the quartic
    """
    tc.validate_relations()
    c1, c2, c3 = tc.c
    lam = tc.lambda_
    a = c2 * c3
    y0 = tc.l1_0**2
    s = 1.0 if c1 > 0 else -1.0  # sign of y'(0) on the positive branch

    if lam == 0.0:
        if a <= 0:
            raise UnsupportedRegimeError("lambda = 0 needs c2 c3 > 0")
        return EllipticReduction("rational", (0.0, 0.0, 0.0), 0.0, math.sqrt(a), 0.0, s)

    r1, r2, r3 = sorted((0.0, lam / c2, lam / c3))
    if r3 - r1 <= 0:
        raise UnsupportedRegimeError("quartic has a triple root")

    if a > 0 and r1 <= y0 <= r2:
        k2 = (r2 - r1) / (r3 - r1)
        amp = (y0 - r1) / (r2 - r1) if r2 > r1 else 0.0
        regime, direction = "lower", s
    elif a < 0 and r2 <= y0 <= r3:
        k2 = (r3 - r2) / (r3 - r1)
        amp = (r3 - y0) / (r3 - r2) if r3 > r2 else 0.0
        regime, direction = "upper", -s
    else:
        raise UnsupportedRegimeError(
            f"y(0) = {y0:.6g} is not on a bounded branch (A = {a:.6g}, roots {r1:.6g}, {r2:.6g}, {r3:.6g})"
        )
    if not 0.0 <= k2 <= 1.0:
        raise UnsupportedRegimeError(f"reduced modulus k^2 = {k2:.6g} leaves [0, 1]")

    k = math.sqrt(k2)
    u0 = inverse_sn(math.sqrt(min(max(amp, 0.0), 1.0)), k)
    return EllipticReduction(regime, (r1, r2, r3), k, math.sqrt(abs(a) * (r3 - r1)), u0, direction)


def closed_form_l1(tc: TranslationConstants, xi: float, reduction: Optional[EllipticReduction] = None) -> float:
    """l1(xi) from the Jacobi-elliptic (or rational) solution of the quartic."""
    red = classify_regime(tc) if reduction is None else reduction
    if red.regime == "rational":
        denom = 1.0 - red.direction * red.omega * tc.l1_0 * xi
        if denom <= 0:
            raise DomainError(f"rational solution blows up before xi = {xi}", xi)
        return tc.l1_0 / denom

    r1, r2, r3 = red.roots
    u = red.u0 + red.direction * red.omega * xi
    sn = jacobi_scd(u, red.k)[0]
    if red.regime == "lower":
        y = r1 + (r2 - r1) * sn * sn
    else:
        y = r3 - (r3 - r2) * sn * sn
    return math.sqrt(max(y, 0.0))


def elliptic_period(tc: TranslationConstants) -> Optional[float]:
    """Period in xi of l1 on an oscillating branch, None when not periodic."""
    red = classify_regime(tc)
    if red.regime == "rational" or red.k >= 1.0:
        return None
    # sn^2 has period 2K
    return 2.0 * complete_K(red.k) / red.omega
