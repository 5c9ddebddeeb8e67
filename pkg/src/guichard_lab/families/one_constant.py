"""Families where exactly one l_i is constant.

    case a:  l = lam (1, cosh phi, sinh phi),  xi = alpha2 x2 + alpha3 x3
    case b:  l = lam (cos phi, 1, sin phi),    xi = alpha1 x1 + alpha3 x3
    case c:  l = lam (sinh phi, cosh phi, 1),  xi = alpha1 x1 + alpha2 x2

phi = b xi + xi0, except case b2 (alpha1^2 = alpha3^2) where phi is any function of xi.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Literal, Optional

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..core.errors import ConstraintError, DomainError
from ..lame.net import Box, GuichardNet, TranslationInvariant

logger = logging.getLogger(__name__)

# axes carried by xi in each case (0-based)
ACTIVE_AXES = {"a": (1, 2), "b1": (0, 2), "b2": (0, 2), "c": (0, 1)}
# ambient of the flat surfaces described by the case
AMBIENT = {"b1": "S3", "b2": "S3", "c": "H3"}

# Samples used to check positivity of sin/cos of a user phi over the xi-range
_PHI_SAMPLES = 2001


class OneConstantFamily(BaseModel):
    """Constants of a one-constant family.

    ``alpha`` takes either the two active components or all three (inactive one zero).
    ``phi_poly`` (ascending coefficients) or ``user_phi`` give phi in case b2.
    """

    model_config = ConfigDict(populate_by_name=True, frozen=True, arbitrary_types_allowed=True)

    case: Literal["a", "b1", "b2", "c"]
    lambda_const: float = Field(alias="lambda")
    b: float = 1.0
    xi0: float = 0.0
    alpha: tuple[float, ...]
    phi_poly: Optional[list[float]] = None
    user_phi: Optional[Callable[[float], float]] = Field(default=None, exclude=True)
    user_phi_prime: Optional[Callable[[float], float]] = Field(default=None, exclude=True)

    @field_validator("alpha")
    @classmethod
    def _alpha_len(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(v) not in (2, 3):
            raise ValueError("alpha needs 2 (active) or 3 components")
        return v

    def alpha_vector(self) -> np.ndarray:
        axes = ACTIVE_AXES[self.case]
        if len(self.alpha) == 2:
            full = np.zeros(3)
            full[list(axes)] = self.alpha
            return full
        full = np.asarray(self.alpha, dtype=float)
        inactive = ({0, 1, 2} - set(axes)).pop()
        if full[inactive] != 0:
            raise ConstraintError(f"case {self.case} needs alpha{inactive + 1} = 0, got {full[inactive]}")
        return full

    def violations(self) -> list[str]:
        out = []
        if self.lambda_const == 0:
            out.append("lambda must be nonzero")
        try:
            alpha = self.alpha_vector()
        except ConstraintError as e:
            return out + e.violations
        i, j = ACTIVE_AXES[self.case]
        if alpha[i] == 0 and alpha[j] == 0:
            out.append(f"alpha{i + 1} and alpha{j + 1} are both zero")
        if self.case in ("b1", "b2"):
            equal = math.isclose(alpha[0] ** 2, alpha[2] ** 2, rel_tol=1e-12, abs_tol=1e-300)
            if self.case == "b1" and equal:
                out.append("case b1 requires alpha1^2 != alpha3^2 (use case b2)")
            if self.case == "b2" and not equal:
                out.append("case b2 requires alpha1^2 = alpha3^2")
        if self.case != "b2" and (self.phi_poly is not None or self.user_phi is not None):
            out.append(f"a user phi is only allowed in case b2, not {self.case}")
        return out

    def phi_functions(self) -> tuple[Callable[[float], float], Optional[Callable[[float], float]]]:
        """(phi, phi') as functions of xi; phi' is None when only phi is known."""
        if self.case == "b2" and self.user_phi is not None:
            return self.user_phi, self.user_phi_prime
        if self.case == "b2" and self.phi_poly is not None:
            poly = Polynomial(self.phi_poly)
            deriv = poly.deriv()
            return (lambda xi: float(poly(xi))), (lambda xi: float(deriv(xi)))
        b, xi0 = self.b, self.xi0
        return (lambda xi: b * xi + xi0), (lambda xi: b)


def _profile_values(case: str, lam: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """l and dl/dphi for a value of phi."""
    if case == "a":
        ch, sh = math.cosh(phi), math.sinh(phi)
        return lam * np.array([1.0, ch, sh]), lam * np.array([0.0, sh, ch])
    if case == "c":
        ch, sh = math.cosh(phi), math.sinh(phi)
        return lam * np.array([sh, ch, 1.0]), lam * np.array([ch, sh, 0.0])
    co, si = math.cos(phi), math.sin(phi)
    return lam * np.array([co, 1.0, si]), lam * np.array([-si, 0.0, co])


def _check_positivity(family: OneConstantFamily, domain: Box, alpha: np.ndarray, phi: Callable[[float], float]) -> None:
    image = domain.corners() @ alpha
    lo, hi = float(image.min()), float(image.max())
    if family.lambda_const < 0:
        raise DomainError("lambda < 0 makes every l_i negative on the positive branch", family.lambda_const)
    if family.case == "b2" and (family.user_phi is not None or family.phi_poly is not None):
        xis = np.linspace(lo, hi, _PHI_SAMPLES)
    else:
        # phi is linear in xi, so its extremes sit at the box corners
        xis = np.array([lo, hi])
    values = np.array([phi(float(x)) for x in xis])

    if family.case in ("a", "c"):
        bad = values <= 0
        factor = "sinh(phi)"
    else:
        bad = (values <= 0) | (values >= math.pi / 2)
        factor = "sin(phi) and cos(phi)"
    if np.any(bad):
        offending = float(xis[np.argmax(bad)])
        axes = ACTIVE_AXES[family.case]
        raise DomainError(
            f"case {family.case}: {factor} must be positive but phi({offending:.6g}) = {phi(offending):.6g}; "
            f"xi = alpha{axes[0] + 1} x{axes[0] + 1} + alpha{axes[1] + 1} x{axes[1] + 1} ranges over "
            f"[{lo:.6g}, {hi:.6g}] on the box",
            offending,
        )


def build_one_constant_family(family: OneConstantFamily, domain: Box) -> GuichardNet:
    """Net of a one-constant family with exact derivatives.

    Raises:
        ConstraintError: case invariants violated
        DomainError: l1 or l3 vanishes (or turns negative) somewhere on the box
    """
    errors = family.violations()
    if errors:
        raise ConstraintError(errors)
    alpha = family.alpha_vector()
    phi, dphi = family.phi_functions()
    _check_positivity(family, domain, alpha, phi)
    case, lam = family.case, family.lambda_const

    def profile(xi: float) -> tuple[np.ndarray, np.ndarray]:
        l, dl_dphi = _profile_values(case, lam, phi(xi))
        if dphi is None:
            return l, np.full(3, np.nan)
        return l, dl_dphi * dphi(xi)

    def l_fn(p: np.ndarray) -> np.ndarray:
        return _profile_values(case, lam, phi(float(np.dot(alpha, p))))[0]

    def dl_fn(p: np.ndarray) -> np.ndarray:
        return np.outer(profile(float(np.dot(alpha, p)))[1], alpha)

    logger.info(f"Built one-constant family case {case} on {domain}")
    return GuichardNet(
        domain=domain,
        l_fn=l_fn,
        dl_fn=None if dphi is None else dl_fn,
        family="one_constant",
        params=family.model_dump(by_alias=True),
        invariant=TranslationInvariant(alpha=alpha, profile=profile),
        phi_fn=lambda p: phi(float(np.dot(alpha, p))),
    )
