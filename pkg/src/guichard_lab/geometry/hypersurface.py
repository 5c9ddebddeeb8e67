"""Hypersurface metric e^{2P} sum l_i^2 dx_i^2 and fundamental forms of the flat surfaces.

Surfaces in H^3 (one-constant case c, lines of curvature (u, v) = (x1, x2)):

    I = sinh^2 phi du^2 + cosh^2 phi dv^2,   II = sinh phi cosh phi (du^2 + dv^2)

Surfaces in S^3 (case b, (u, v) = (x1, x3)):

    I = cos^2 phi du^2 + sin^2 phi dv^2,     II = sin phi cos phi (du^2 - dv^2)

The family's lambda acts as a homothety of the net and is dropped from the forms.
The Gauss equation reads K_int = K_ambient + det II / det I with K_ambient = -1 (H^3)
or +1 (S^3).
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, computed_field

from ..core.errors import DomainError, UnsupportedNetError
from ..families.one_constant import ACTIVE_AXES, AMBIENT, OneConstantFamily
from ..lame.net import GuichardNet

logger = logging.getLogger(__name__)

Ambient = Literal["H3", "S3"]
AMBIENT_CURVATURE = {"H3": -1.0, "S3": 1.0}
ConformalFactor = Callable[[np.ndarray], float]


def hypersurface_metric(net: GuichardNet, p: Sequence[float], conformal_factor: Optional[ConformalFactor] = None) -> np.ndarray:
    """diag(e^{2P} l1^2, e^{2P} l2^2, e^{2P} l3^2) at ``p``; P defaults to 0.

    Raises:
        DomainError: a diagonal entry is not positive
    """
    p = np.asarray(p, dtype=float)
    l = net.l(p)
    weight = 1.0 if conformal_factor is None else math.exp(2.0 * float(conformal_factor(p)))
    g = np.diag(weight * l * l)
    if np.any(np.diag(g) <= 0):
        raise DomainError(f"Hypersurface metric is not positive definite at x = {p.tolist()}", p.tolist())
    return g


class FundamentalFormsPair(BaseModel):
    """First and second fundamental forms at one point with the Gauss-equation check."""

    first: list[list[float]]
    second: list[list[float]]
    ambient: Ambient
    metric_curvature: float

    @computed_field
    @property
    def extrinsic_curvature(self) -> float:
        return float(np.linalg.det(np.array(self.second)) / np.linalg.det(np.array(self.first)))

    @computed_field
    @property
    def intrinsic_curvature(self) -> float:
        """K_ambient + det II / det I."""
        return AMBIENT_CURVATURE[self.ambient] + self.extrinsic_curvature

    @computed_field
    @property
    def gauss_residual(self) -> float:
        """|K from the Gauss equation - K computed from I alone|."""
        return abs(self.intrinsic_curvature - self.metric_curvature)


def _forms(phi: float, ambient: Ambient) -> tuple[list[list[float]], list[list[float]]]:
    if ambient == "H3":
        if phi <= 0:
            raise DomainError(f"phi = {phi:.6g} must be positive for the H3 forms", phi)
        sh, ch = math.sinh(phi), math.cosh(phi)
        return [[sh * sh, 0.0], [0.0, ch * ch]], [[sh * ch, 0.0], [0.0, sh * ch]]
    if not 0 < phi < math.pi / 2:
        raise DomainError(f"phi = {phi:.6g} must lie in (0, pi/2) for the S3 forms", phi)
    co, si = math.cos(phi), math.sin(phi)
    return [[co * co, 0.0], [0.0, si * si]], [[si * co, 0.0], [0.0, -si * co]]


def _first_form_curvature(phi: float, laplacian: float, wave: float, ambient: Ambient) -> float:
    # sinh^2 phi du^2 + cosh^2 phi dv^2 has K = -(phi_uu + phi_vv) / (sinh phi cosh phi);
    # cos^2 phi du^2 + sin^2 phi dv^2 has K = -(phi_uu - phi_vv) / (sin phi cos phi)
    if ambient == "H3":
        return -laplacian / (math.sinh(phi) * math.cosh(phi))
    return -wave / (math.sin(phi) * math.cos(phi))


def flat_surface_forms(family: OneConstantFamily, q: Sequence[float]) -> FundamentalFormsPair:
    """Fundamental forms at the line-of-curvature point ``q`` = (u, v) of the family's flat surface.

    Case c gives a surface in H^3 with (u, v) = (x1, x2); case b (b1, b2) a surface in S^3
    with (u, v) = (x1, x3).
    """
    if family.case not in AMBIENT:
        raise UnsupportedNetError(f"case {family.case} has no associated flat surface (use case b or c)")
    ambient: Ambient = AMBIENT[family.case]
    alpha = family.alpha_vector()
    i, j = ACTIVE_AXES[family.case]
    u, v = float(q[0]), float(q[1])
    xi = alpha[i] * u + alpha[j] * v
    phi_fn, _ = family.phi_functions()
    phi = phi_fn(xi)

    # phi(u, v) = f(alpha_i u + alpha_j v): Laplacian and wave operator from f''
    h = 1e-4
    f2 = (phi_fn(xi + h) - 2.0 * phi + phi_fn(xi - h)) / (h * h)
    if family.case != "b2" or (family.user_phi is None and family.phi_poly is None):
        f2 = 0.0
    laplacian = f2 * (alpha[i] ** 2 + alpha[j] ** 2)
    wave = f2 * (alpha[i] ** 2 - alpha[j] ** 2)

    first, second = _forms(phi, ambient)
    return FundamentalFormsPair(
        first=first,
        second=second,
        ambient=ambient,
        metric_curvature=_first_form_curvature(phi, laplacian, wave, ambient),
    )


def harmonicity_residual(phi: Callable[[float, float], float], q: Sequence[float], ambient: Ambient = "H3", h: float = 1e-4) -> float:
    """phi_uu + phi_vv (H^3) or phi_uu - phi_vv (S^3) at ``q`` by central differences."""
    u, v = float(q[0]), float(q[1])
    center = phi(u, v)
    phi_uu = (phi(u + h, v) - 2.0 * center + phi(u - h, v)) / (h * h)
    phi_vv = (phi(u, v + h) - 2.0 * center + phi(u, v - h)) / (h * h)
    return phi_uu + phi_vv if ambient == "H3" else phi_uu - phi_vv


def flat_surface_forms_general(
    phi: Callable[[float, float], float],
    q: Sequence[float],
    ambient: Ambient = "H3",
    h: float = 1e-4,
) -> FundamentalFormsPair:
    """Fundamental forms for a user phi(u, v); the Gauss equation holds exactly when phi is
    harmonic (H^3) or solves the wave equation (S^3)."""
    u, v = float(q[0]), float(q[1])
    value = phi(u, v)
    first, second = _forms(value, ambient)
    op = harmonicity_residual(phi, q, ambient, h)
    return FundamentalFormsPair(
        first=first,
        second=second,
        ambient=ambient,
        metric_curvature=_first_form_curvature(value, op, op, ambient),
    )
