"""Christoffel symbols and curvatures of the net metric g = sum_i l_i^2 dx_i^2.

Axes are 0-based throughout: ``axis=0`` is x1.
"""
from __future__ import annotations

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..core.config import settings
from ..core.errors import DomainError, UnsupportedNetError
from ..lame.net import GuichardNet, TranslationInvariant
from ..lame.residuals import central_difference

logger = logging.getLogger(__name__)


def christoffel_from(l: np.ndarray, dl: np.ndarray) -> np.ndarray:
    """gamma[k, i, j] = Gamma^k_ij of the diagonal metric with coefficients l."""
    gamma = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            # Gamma^i_ij = Gamma^i_ji = l_{i,x_j} / l_i (includes i == j)
            gamma[i, i, j] = dl[i, j] / l[i]
            gamma[i, j, i] = dl[i, j] / l[i]
        for k in range(3):
            if k != i:
                gamma[k, i, i] = -l[i] * dl[i, k] / l[k] ** 2
    return gamma


def christoffel(net: GuichardNet, p: Sequence[float]) -> np.ndarray:
    """Christoffel symbols Gamma^k_ij at ``p`` as an array indexed [k, i, j]."""
    l, dl = net.evaluate(p)
    return christoffel_from(l, dl)


def metric_compatibility_residual(net: GuichardNet, p: Sequence[float]) -> float:
    """max_{i,j,k} |d_k g_ij - Gamma^m_ki g_mj - Gamma^m_kj g_im| with d_k g by differences."""
    p = np.asarray(p, dtype=float)
    l, dl = net.evaluate(p)
    gamma = christoffel_from(l, dl)
    g = np.diag(l * l)
    dg = central_difference(lambda q: np.diag(np.asarray(net.l_fn(q)) ** 2), p, net.fd_steps(settings.SECOND_ORDER_REL_STEP), True)
    worst = 0.0
    for k in range(3):
        for i in range(3):
            for j in range(3):
                expected = gamma[:, k, i] @ g[:, j] + gamma[:, k, j] @ g[i, :]
                worst = max(worst, abs(dg[i, j, k] - expected))
    return float(worst)


def curvatures_from(l: np.ndarray, dl: np.ndarray) -> np.ndarray:
    """(K1, K2, K3) from l and its Jacobian, K_i = l_{k,x_i} l_{j,x_i} / (l_i^2 l_j l_k)."""
    out = np.empty(3)
    for axis in range(3):
        j, k = _others(axis)
        out[axis] = dl[k, axis] * dl[j, axis] / (l[axis] ** 2 * l[j] * l[k])
    return out


def _others(axis: int) -> tuple[int, int]:
    if axis not in (0, 1, 2):
        raise DomainError(f"axis must be 0, 1 or 2, got {axis}", axis)
    j, k = (a for a in range(3) if a != axis)
    return j, k


def coordinate_surface_curvature(
    net: GuichardNet,
    axis: int,
    p: Sequence[float],
    method: Literal["extrinsic", "intrinsic"] = "extrinsic",
) -> float:
    """Gaussian curvature K_i of the surface x_i = const through ``p``.

    ``extrinsic`` uses K_i = l_{k,x_i} l_{j,x_i} / (l_i^2 l_j l_k), valid on solutions of
    Lame's system. ``intrinsic`` evaluates the induced metric l_j^2 du^2 + l_k^2 dv^2 with
    the formula for orthogonal metrics,
    K = -(1 / (l_j l_k)) [d_u(l_{k,u} / l_j) + d_v(l_{j,v} / l_k)], by differences.
    """
    j, k = _others(axis)
    p = np.asarray(p, dtype=float)
    l, dl = net.evaluate(p)
    if method == "extrinsic":
        return float(curvatures_from(l, dl)[axis])

    steps = net.fd_steps(settings.SECOND_ORDER_REL_STEP)

    def ratios(q: np.ndarray) -> np.ndarray:
        lq = np.asarray(net.l_fn(q), dtype=float)
        dq = net.raw_dl(q)
        return np.array([dq[k, j] / lq[j], dq[j, k] / lq[k]])

    d = central_difference(ratios, p, steps, richardson=True)
    return float(-(d[0, j] + d[1, k]) / (l[j] * l[k]))


def curvature_row(net: GuichardNet, p: Sequence[float]) -> tuple[float, float, float]:
    """(K1, K2, K3) at ``p`` (extrinsic form)."""
    l, dl = net.evaluate(p)
    return tuple(float(v) for v in curvatures_from(l, dl))


def _translation_invariant(net: GuichardNet) -> TranslationInvariant:
    inv = net.invariant
    if not isinstance(inv, TranslationInvariant):
        raise UnsupportedNetError(f"{net.family} net has no translation invariant xi = alpha . x")
    return inv


def level_surface_grad_norm(net: GuichardNet, p: Sequence[float]) -> float:
    """|grad xi| = sqrt(sum_j alpha_j^2 / l_j^2) at ``p``."""
    inv = _translation_invariant(net)
    l = net.l(p)
    return float(np.sqrt(np.sum(inv.alpha**2 / l**2)))


def mean_curvature_from(l: np.ndarray, dl: np.ndarray, alpha: np.ndarray) -> float:
    """Mean curvature (trace convention) of a plane alpha . x = const in the net metric.

    H = -div(N) for N = grad xi / |grad xi|, i.e.
    H = (1/|grad xi|) [sum_i Gamma^k_ii alpha_k / l_i^2 - sum_ij n^i n^j Gamma^k_ij alpha_k]
    with n^i = alpha_i / (l_i^2 |grad xi|).
    """
    gamma = christoffel_from(l, dl)
    norm = float(np.sqrt(np.sum(alpha**2 / l**2)))
    n = alpha / (l**2 * norm)
    contracted = np.einsum("kij,k->ij", gamma, alpha)
    laplacian_part = float(np.sum(np.diag(contracted) / l**2))
    normal_part = float(n @ contracted @ n)
    return (laplacian_part - normal_part) / norm


def level_surface_mean_curvature(net: GuichardNet, xi0: float, point: Optional[Sequence[float]] = None) -> float:
    """Mean curvature of the level surface xi = xi0.

    Without ``point`` the value comes from the xi-profile; with it, from the net at that
    point, which must lie on the level surface.
    """
    inv = _translation_invariant(net)
    if point is None:
        l, lp = inv.profile(xi0)
        dl = np.outer(lp, inv.alpha)
    else:
        if abs(inv.xi(point) - xi0) > 1e-9 * max(1.0, abs(xi0)):
            raise DomainError(f"Point {list(point)} has xi = {inv.xi(point)}, not {xi0}", list(point))
        l, dl = net.evaluate(point)
    return mean_curvature_from(l, dl, inv.alpha)


def mean_curvature_by_divergence(net: GuichardNet, p: Sequence[float]) -> float:
    """-div(grad xi / |grad xi|) by central differences: div V = d_i(sqrt(g) V^i) / sqrt(g)."""
    inv = _translation_invariant(net)
    p = np.asarray(p, dtype=float)
    alpha = inv.alpha

    def flux(q: np.ndarray) -> np.ndarray:
        lq = np.asarray(net.l_fn(q), dtype=float)
        norm = np.sqrt(np.sum(alpha**2 / lq**2))
        return np.prod(lq) * alpha / (lq**2 * norm)

    d = central_difference(flux, p, net.fd_steps(settings.SECOND_ORDER_REL_STEP), richardson=True)
    l = net.l(p)
    return float(-np.trace(d) / np.prod(l))


def level_set_frame(alpha: np.ndarray) -> np.ndarray:
    """Orthonormal 2-frame (rows) spanning the plane orthogonal to alpha."""
    alpha = np.asarray(alpha, dtype=float)
    _, _, vt = np.linalg.svd(alpha.reshape(1, 3))
    return vt[1:]


def sample_level_set(
    net: GuichardNet,
    xi0: float,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    max_tries: int = 200,
) -> np.ndarray:
    """``n`` seeded random points of the box lying on the plane xi = xi0.

    The plane is parametrized by the orthonormal frame of :func:`level_set_frame`
    around its point nearest to the box center.
    """
    inv = _translation_invariant(net)
    n = settings.LEVEL_SET_POINTS if n is None else n
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    alpha = inv.alpha
    center = net.domain.center
    # nearest point with alpha . p + offset = xi0
    base = center + (xi0 - inv.xi(center)) * alpha / float(alpha @ alpha)
    frame = level_set_frame(alpha)
    radius = 0.5 * float(np.linalg.norm(net.domain.extent))

    points = []
    for _ in range(max_tries):
        st = rng.uniform(-radius, radius, size=(4 * n, 2))
        cand = base + st @ frame
        inside = [q for q in cand if net.domain.contains(q, slack=0.0)]
        points.extend(inside)
        if len(points) >= n:
            return np.array(points[:n])
    raise DomainError(f"Level set xi = {xi0} does not meet the net domain", xi0)


class LevelSetSummary(BaseModel):
    """Spread of |grad xi| and H over random points of one level surface."""

    xi: float
    points: int
    grad_norm: float
    grad_norm_variance: float
    mean_curvature: float
    mean_curvature_variance: float


def level_set_summary(net: GuichardNet, xi0: float, n: Optional[int] = None, seed: Optional[int] = None) -> LevelSetSummary:
    """Sample a level surface and report |grad xi| and H with their variances."""
    pts = sample_level_set(net, xi0, n, seed)
    grads = np.array([level_surface_grad_norm(net, q) for q in pts])
    inv = _translation_invariant(net)
    hs = np.array([level_surface_mean_curvature(net, inv.xi(q), point=q) for q in pts])
    return LevelSetSummary(
        xi=xi0,
        points=len(pts),
        grad_norm=float(grads.mean()),
        grad_norm_variance=float(grads.var()),
        mean_curvature=float(hs.mean()),
        mean_curvature_variance=float(hs.var()),
    )
