"""Families invariant under translations combined with dilations.

The l_i depend on eta = (a . x) / (b . x) through phi(eta); with N_i = a_i - b_i eta and
beta = b . x, d eta / d x_i = N_i / beta. The pair (a_s, b_s) vanishes for the axis the
net does not depend on:

    case a  (a1 = b1 = 0): l = lam (1, cosh phi, sinh phi), phi harmonic in (x2, x3)
    case b  (a2 = b2 = 0): l = lam (cos phi, 1, sin phi),   phi solves the wave equation in (x1, x3)
    case c  (a3 = b3 = 0): l = lam (sinh phi, cosh phi, 1), phi harmonic in (x1, x2)

Case b splits into b1 (b1 = b3, logarithm of a linear function) and b2 (b1 != b3,
logarithm of a ratio).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ConstraintError, DomainError
from ..lame.net import Box, DilationInvariant, GuichardNet
from .one_constant import _profile_values

logger = logging.getLogger(__name__)

_ZERO_AXIS = {"a": 0, "b1": 1, "b2": 1, "c": 2}


class DilationConstants(BaseModel):
    """Constants of a dilation family; unused integration constants are ignored."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    case: Literal["a", "b1", "b2", "c"]
    a_vec: tuple[float, float, float] = Field(alias="a")
    b_vec: tuple[float, float, float] = Field(alias="b")
    lambda_const: float = Field(alias="lambda")
    C0: float = 1.0
    C1: float = 0.0
    D0: float = 1.0
    D1: float = 0.0
    D2: float = 1.0
    D3: float = 0.0
    E0: float = 1.0
    E1: float = 0.0

    def violations(self) -> list[str]:
        a, b = np.asarray(self.a_vec, dtype=float), np.asarray(self.b_vec, dtype=float)
        out = []
        if self.lambda_const == 0:
            out.append("lambda must be nonzero")
        z = _ZERO_AXIS[self.case]
        if a[z] != 0 or b[z] != 0:
            out.append(f"case {self.case} requires a{z + 1} = b{z + 1} = 0")
        if np.linalg.matrix_rank(np.vstack([a, b]), tol=1e-12 * max(np.abs(a).max(), np.abs(b).max(), 1.0)) < 2:
            out.append("a and b must be linearly independent")
        if self.case == "b1" and b[0] != b[2]:
            out.append(f"case b1 requires b1 = b3, got {b[0]} and {b[2]}")
        if self.case == "b1" and b[0] == 0:
            out.append("case b1 requires b1 = b3 != 0")
        if self.case == "b2" and b[0] == b[2]:
            out.append("case b2 requires b1 != b3 (use case b1)")
        return out


@dataclass(frozen=True)
class DilationProfile:
    """phi(eta) and its derivative for one set of constants."""

    constants: DilationConstants
    phi: Callable[[float], float]
    dphi: Callable[[float], float]
    kind: Literal["arctan", "log"]

    def argument_ok(self, eta: float) -> bool:
        return self.kind == "arctan" or _log_argument(self.constants, eta) > 0

    def ode_residual(self, eta: float, h: float = 1e-4) -> float:
        """phi'' Q - 2 phi' P, the ODE phi(eta) solves (phi'' by central differences).

        Q = N2^2 + N3^2 (case a), N1^2 - N3^2 (case b) or N1^2 + N2^2 (case c), and
        P = -Q'/2.
        """
        a, b = np.asarray(self.constants.a_vec), np.asarray(self.constants.b_vec)
        n = a - b * eta
        case = self.constants.case
        if case == "a":
            q, p = n[1] ** 2 + n[2] ** 2, b[1] * n[1] + b[2] * n[2]
        elif case == "c":
            q, p = n[0] ** 2 + n[1] ** 2, b[0] * n[0] + b[1] * n[1]
        else:
            q, p = n[0] ** 2 - n[2] ** 2, b[0] * n[0] - b[2] * n[2]
        d2 = (self.dphi(eta + h) - self.dphi(eta - h)) / (2.0 * h)
        return d2 * q - 2.0 * self.dphi(eta) * p


def _log_argument(d: DilationConstants, eta: float) -> float:
    a1, _, a3 = d.a_vec
    b1, _, b3 = d.b_vec
    if d.case == "b1":
        return 2.0 * b1 * eta - a1 - a3
    den = (b3 - b1) * eta - (a3 - a1)
    if den == 0:
        return -1.0
    return ((b3 + b1) * eta - (a3 + a1)) / den


def dilation_profile(d: DilationConstants) -> DilationProfile:
    """The closed-form phi(eta) of each case."""
    a1, a2, a3 = d.a_vec
    b1, b2, b3 = d.b_vec

    if d.case in ("a", "c"):
        if d.case == "a":
            det = a2 * b3 - a3 * b2
            bb, m = b2 * b2 + b3 * b3, a2 * b2 + a3 * b3
            c0, c1 = d.C0, d.C1
            # arctan[(b2^2 + b3^2)/(a3 b2 - a2 b3) (eta - M/B)]
            scale = bb / (a3 * b2 - a2 * b3)
        else:
            det = a2 * b1 - a1 * b2
            bb, m = b1 * b1 + b2 * b2, a2 * b2 + a1 * b1
            c0, c1 = d.E0, d.E1
            scale = bb / det
        shift = m / bb
        coef = c0 / det

        def phi(eta: float) -> float:
            return coef * math.atan(scale * (eta - shift)) + c1

        def dphi(eta: float) -> float:
            t = scale * (eta - shift)
            return coef * scale / (1.0 + t * t)

        return DilationProfile(d, phi, dphi, "arctan")

    if d.case == "b1":
        coef = d.D0 / (2.0 * b1 * (a3 - a1))
        c1 = d.D1

        def phi(eta: float) -> float:
            return coef * math.log(2.0 * b1 * eta - a1 - a3) + c1

        def dphi(eta: float) -> float:
            return coef * 2.0 * b1 / (2.0 * b1 * eta - a1 - a3)

        return DilationProfile(d, phi, dphi, "log")

    coef = d.D2 / (2.0 * (a1 * b3 - a3 * b1))
    c1 = d.D3

    def phi(eta: float) -> float:
        return coef * math.log(_log_argument(d, eta)) + c1

    def dphi(eta: float) -> float:
        num = (b3 + b1) * eta - (a3 + a1)
        den = (b3 - b1) * eta - (a3 - a1)
        return coef * ((b3 + b1) / num - (b3 - b1) / den)

    return DilationProfile(d, phi, dphi, "log")


def _valid_eta_interval(d: DilationConstants) -> str:
    """Readable description of where the logarithm's argument is positive."""
    a1, _, a3 = d.a_vec
    b1, _, b3 = d.b_vec
    if d.case == "b1":
        root = (a1 + a3) / (2.0 * b1)
        return f"eta > {root:.6g}" if b1 > 0 else f"eta < {root:.6g}"
    roots = sorted(r for r in ((a3 + a1) / (b3 + b1) if b3 + b1 else None, (a3 - a1) / (b3 - b1)) if r is not None)
    return "eta outside the roots " + ", ".join(f"{r:.6g}" for r in roots) + " where the ratio is positive"


def _check_domain(d: DilationConstants, profile: DilationProfile, domain: Box) -> tuple[float, float]:
    a, b = np.asarray(d.a_vec), np.asarray(d.b_vec)
    corners = domain.corners()
    beta = corners @ b
    if np.any(beta == 0) or beta.min() < 0 < beta.max():
        raise DomainError(
            f"denominator b . x changes sign or vanishes on the box (range [{beta.min():.6g}, {beta.max():.6g}])",
            (float(beta.min()), float(beta.max())),
        )
    # a linear-fractional eta attains its extremes at the vertices of a box
    etas = (corners @ a) / beta
    lo, hi = float(etas.min()), float(etas.max())

    if profile.kind == "log":
        samples = np.linspace(lo, hi, 257)
        bad = [e for e in samples if _log_argument(d, float(e)) <= 0]
        if bad:
            raise DomainError(
                f"case {d.case}: logarithm argument is not positive at eta = {bad[0]:.6g}; "
                f"eta ranges over [{lo:.6g}, {hi:.6g}] on the box, valid for {_valid_eta_interval(d)}",
                float(bad[0]),
            )

    # phi is monotone in eta wherever its formula is defined
    ends = [profile.phi(lo), profile.phi(hi)]
    if d.case in ("a", "c"):
        ok = min(ends) > 0
        need = "phi > 0 (sinh phi > 0)"
    else:
        ok = min(ends) > 0 and max(ends) < math.pi / 2
        need = "0 < phi < pi/2 (sin phi, cos phi > 0)"
    if not ok:
        raise DomainError(
            f"case {d.case}: metric positivity needs {need}, but phi ranges over "
            f"[{min(ends):.6g}, {max(ends):.6g}] for eta in [{lo:.6g}, {hi:.6g}]",
            (min(ends), max(ends)),
        )
    return lo, hi


def build_dilation_family(d: DilationConstants, domain: Box) -> GuichardNet:
    """Net of a dilation family with exact derivatives via d eta / d x_i = N_i / beta.

    Raises:
        ConstraintError: dependent (a, b), wrong zero pair or case gate
        DomainError: b . x vanishes on the box, a log argument leaves (0, inf) or positivity fails
    """
    errors = d.violations()
    if errors:
        raise ConstraintError(errors)
    profile = dilation_profile(d)
    if d.lambda_const < 0:
        raise DomainError("lambda < 0 makes every l_i negative on the positive branch", d.lambda_const)
    eta_range = _check_domain(d, profile, domain)

    a, b = np.asarray(d.a_vec, dtype=float), np.asarray(d.b_vec, dtype=float)
    case = "b" if d.case.startswith("b") else d.case
    lam = d.lambda_const
    invariant = DilationInvariant(a=a, b=b)

    def l_fn(p: np.ndarray) -> np.ndarray:
        return _profile_values(case, lam, profile.phi(invariant.eta(p)))[0]

    def dl_fn(p: np.ndarray) -> np.ndarray:
        beta = float(np.dot(b, p))
        eta = float(np.dot(a, p)) / beta
        _, dl_dphi = _profile_values(case, lam, profile.phi(eta))
        grad_eta = (a - b * eta) / beta
        return np.outer(dl_dphi * profile.dphi(eta), grad_eta)

    logger.info(f"Built dilation family case {d.case}; eta in [{eta_range[0]:.6g}, {eta_range[1]:.6g}]")
    return GuichardNet(
        domain=domain,
        l_fn=l_fn,
        dl_fn=dl_fn,
        family="dilation",
        params={**d.model_dump(by_alias=True), "eta_range": list(eta_range)},
        invariant=invariant,
        phi_fn=lambda p: profile.phi(invariant.eta(p)),
    )
