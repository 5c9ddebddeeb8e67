"""Guichard nets: evaluable metric coefficients l_i on a box, with derivatives.

A net maps a point x = (x1, x2, x3) to l = (l1, l2, l3) and dl[i][j] = dl_i/dx_j.
Families return nets with exact derivatives; nets without a derivative callable fall
back to central differences.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from ..core.config import settings
from ..core.errors import ConstraintError, DomainError, SingularityError

logger = logging.getLogger(__name__)

# epsilon_s of the Guichard condition sum_s eps_s l_s^2 = 0
EPSILON = np.array([1.0, -1.0, 1.0])

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower_i, upper_i] in R^3."""

    lower: tuple[float, float, float]
    upper: tuple[float, float, float]

    def __post_init__(self):
        if len(self.lower) != 3 or len(self.upper) != 3:
            raise ConstraintError("Box bounds need three components")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if not lo < hi:
                raise ConstraintError(f"Box axis x{i + 1} is empty: [{lo}, {hi}]")

    @classmethod
    def from_intervals(cls, intervals: Sequence[Sequence[float]]) -> "Box":
        return cls(
            tuple(float(iv[0]) for iv in intervals),
            tuple(float(iv[1]) for iv in intervals),
        )

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.upper) + np.asarray(self.lower))

    def contains(self, p: Sequence[float], slack: float = 1e-12) -> bool:
        p = np.asarray(p, dtype=float)
        margin = slack * np.maximum(self.extent, 1.0)
        return bool(np.all(p >= np.asarray(self.lower) - margin) and np.all(p <= np.asarray(self.upper) + margin))

    def corners(self) -> np.ndarray:
        lo, hi = self.lower, self.upper
        return np.array([[(lo, hi)[a][0], (lo, hi)[b][1], (lo, hi)[c][2]] for a in (0, 1) for b in (0, 1) for c in (0, 1)])

    def grid(self, counts: Sequence[int] | int | None = None, inset: Optional[float] = None) -> np.ndarray:
        """Uniform sample grid, shrunk by ``inset`` (fraction of the extent) on every side.

        Returns:
            Array of shape (N1*N2*N3, 3), x1 varying slowest
        """
        if counts is None:
            counts = settings.GRID_POINTS
        if isinstance(counts, int):
            counts = (counts, counts, counts)
        inset = settings.GRID_INSET if inset is None else inset
        axes = []
        for lo, hi, n in zip(self.lower, self.upper, counts):
            pad = inset * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, int(n)))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def translated(self, v: Sequence[float]) -> "Box":
        v = np.asarray(v, dtype=float)
        return Box(tuple(np.asarray(self.lower) + v), tuple(np.asarray(self.upper) + v))

    def scaled(self, s: float) -> "Box":
        a, b = np.asarray(self.lower) * s, np.asarray(self.upper) * s
        return Box(tuple(np.minimum(a, b)), tuple(np.maximum(a, b)))


@dataclass(frozen=True)
class DerivativeMode:
    """How dl is obtained: ``exact`` (closed form) or ``finite_difference``.

    ``step`` is relative to the box extent per axis; None means ``settings.FD_REL_STEP``.
    """

    kind: Literal["exact", "finite_difference"] = "exact"
    step: Optional[float] = None

    @classmethod
    def finite_difference(cls, step: Optional[float] = None) -> "DerivativeMode":
        return cls("finite_difference", step)

    @property
    def rel_step(self) -> float:
        return settings.FD_REL_STEP if self.step is None else self.step


@dataclass(frozen=True, eq=False)
class TranslationInvariant:
    """Net depending on x only through xi = alpha . x + offset.

    ``profile(xi)`` returns (l, l_prime) as arrays of shape (3,).
    """

    alpha: np.ndarray
    profile: Callable[[float], tuple[np.ndarray, np.ndarray]]
    offset: float = 0.0
    xi_range: Optional[tuple[float, float]] = None

    def xi(self, p: Sequence[float]) -> float:
        return float(np.dot(self.alpha, p) + self.offset)


@dataclass(frozen=True, eq=False)
class DilationInvariant:
    """Net depending on x only through eta = (a . x) / (b . x)."""

    a: np.ndarray
    b: np.ndarray

    def eta(self, p: Sequence[float]) -> float:
        return float(np.dot(self.a, p) / np.dot(self.b, p))


@dataclass(frozen=True, eq=False)
class GuichardNet:
    """Evaluable field x -> (l, dl) on a box.

    Attributes:
        domain: Box the net is defined on
        l_fn: Point -> array (3,) of metric coefficients
        dl_fn: Point -> array (3, 3) with dl[i][j] = dl_i/dx_j, or None for finite differences
        derivative_mode: Exact or finite-difference derivatives
        family: Family tag (``translation``, ``one_constant``, ``dilation``, ``constant``)
        params: Constants the net was built from (JSON-able)
        invariant: Translation/dilation invariant when the net has one
        phi_fn: Point -> phi of the cos/cosh presentation, when known in closed form
    """

    domain: Box
    l_fn: ArrayFn
    dl_fn: Optional[ArrayFn] = None
    derivative_mode: DerivativeMode = field(default_factory=DerivativeMode)
    family: str = "custom"
    params: dict = field(default_factory=dict)
    invariant: Optional[TranslationInvariant | DilationInvariant] = None
    phi_fn: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        if self.derivative_mode.kind == "exact" and self.dl_fn is None:
            object.__setattr__(self, "derivative_mode", DerivativeMode.finite_difference())

    def _check(self, p: np.ndarray) -> None:
        if not self.domain.contains(p):
            raise DomainError(f"Point {p.tolist()} lies outside the net domain {self.domain}", p.tolist())

    def fd_steps(self, rel: Optional[float] = None) -> np.ndarray:
        """Per-axis absolute difference steps."""
        rel = self.derivative_mode.rel_step if rel is None else rel
        return rel * self.domain.extent

    def l(self, p: Sequence[float]) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        self._check(p)
        return np.asarray(self.l_fn(p), dtype=float)

    def raw_dl(self, p: np.ndarray) -> np.ndarray:
        """dl at ``p`` without the domain check (used by difference stencils)."""
        if self.derivative_mode.kind == "exact":
            return np.asarray(self.dl_fn(p), dtype=float)
        steps = self.fd_steps()
        dl = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = steps[j]
            dl[:, j] = (np.asarray(self.l_fn(p + e)) - np.asarray(self.l_fn(p - e))) / (2.0 * steps[j])
        return dl

    def evaluate(self, p: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Return (l, dl) at ``p``; raises when p is outside or some |l_j| is below the guard."""
        p = np.asarray(p, dtype=float)
        self._check(p)
        l = np.asarray(self.l_fn(p), dtype=float)
        guard_singularity(l, p)
        return l, self.raw_dl(p)

    def with_mode(self, mode: DerivativeMode) -> "GuichardNet":
        """Same net with another derivative mode (exact requires dl_fn)."""
        if mode.kind == "exact" and self.dl_fn is None:
            raise ConstraintError("Exact derivatives are not available for this net")
        return replace(self, derivative_mode=mode)


def guard_singularity(l: np.ndarray, p: Sequence[float]) -> None:
    small = np.flatnonzero(np.abs(l) < settings.SINGULARITY_GUARD)
    if small.size:
        j = int(small[0])
        raise SingularityError(
            f"l{j + 1} = {l[j]:.3e} vanishes at x = {np.asarray(p).tolist()}", point=p
        )


def constant_net(values: Sequence[float], domain: Box) -> GuichardNet:
    """Net with l_i identically equal to ``values`` (not necessarily Guichard)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (3,):
        raise ConstraintError("A constant net needs three values")
    return GuichardNet(
        domain=domain,
        l_fn=lambda p: values.copy(),
        dl_fn=lambda p: np.zeros((3, 3)),
        family="constant",
        params={"l": values.tolist()},
        phi_fn=None,
    )


def translate(net: GuichardNet, v: Sequence[float]) -> GuichardNet:
    """Image of ``net`` under x -> x + v."""
    v = np.asarray(v, dtype=float)
    l_fn, dl_fn, phi_fn = net.l_fn, net.dl_fn, net.phi_fn
    invariant = net.invariant
    if isinstance(invariant, TranslationInvariant):
        invariant = replace(invariant, offset=invariant.offset - float(np.dot(invariant.alpha, v)))
    elif isinstance(invariant, DilationInvariant):
        # eta is not preserved by translations
        invariant = None
    return replace(
        net,
        domain=net.domain.translated(v),
        l_fn=lambda p: l_fn(p - v),
        dl_fn=None if dl_fn is None else (lambda p: dl_fn(p - v)),
        params={**net.params, "translate": v.tolist()},
        invariant=invariant,
        phi_fn=None if phi_fn is None else (lambda p: phi_fn(p - v)),
    )


def dilate_x(net: GuichardNet, scale: float) -> GuichardNet:
    """Image of ``net`` under x -> scale * x (l unchanged, derivatives divided by scale)."""
    if scale == 0:
        raise ConstraintError("Dilation factor for x must be nonzero")
    s = float(scale)
    l_fn, dl_fn, phi_fn = net.l_fn, net.dl_fn, net.phi_fn
    invariant = net.invariant
    if isinstance(invariant, TranslationInvariant):
        invariant = replace(invariant, alpha=invariant.alpha / s)
    return replace(
        net,
        domain=net.domain.scaled(s),
        l_fn=lambda p: l_fn(p / s),
        dl_fn=None if dl_fn is None else (lambda p: np.asarray(dl_fn(p / s)) / s),
        params={**net.params, "dilate_x": s},
        invariant=invariant,
        phi_fn=None if phi_fn is None else (lambda p: phi_fn(p / s)),
    )


def dilate_l(net: GuichardNet, rho: float) -> GuichardNet:
    """Image of ``net`` under l -> rho * l."""
    if rho == 0:
        raise ConstraintError("Dilation factor for l must be nonzero")
    r = float(rho)
    l_fn, dl_fn = net.l_fn, net.dl_fn
    invariant = net.invariant
    if isinstance(invariant, TranslationInvariant):
        profile = invariant.profile

        def scaled_profile(xi: float) -> tuple[np.ndarray, np.ndarray]:
            l, lp = profile(xi)
            return r * l, r * lp

        invariant = replace(invariant, profile=scaled_profile)
    return replace(
        net,
        l_fn=lambda p: r * np.asarray(l_fn(p)),
        dl_fn=None if dl_fn is None else (lambda p: r * np.asarray(dl_fn(p))),
        params={**net.params, "dilate_l": r},
        invariant=invariant,
    )
