"""AGM, complete elliptic integral K(k) and Jacobi sn/cn/dn for real arguments.

The Jacobi functions use the descending Landen (AGM) ladder: build the sequences
a_n, b_n, c_n from (1, k', k), start from the amplitude phi_N = 2^N a_N u and walk back
with phi_{n-1} = (phi_n + asin(c_n / a_n * sin phi_n)) / 2.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

from ..core.config import settings
from ..core.errors import DomainError

logger = logging.getLogger(__name__)


def _check_modulus(k: float) -> None:
    if not (0.0 <= k <= 1.0) or math.isnan(k):
        raise DomainError(f"Elliptic modulus must lie in [0, 1], got {k}", k)


def agm(a: float, b: float, tol: Optional[float] = None, max_iter: Optional[int] = None) -> float:
    """Arithmetic-geometric mean of two positive reals.

    Args:
        a: First argument, > 0
        b: Second argument, > 0
        tol: Relative convergence tolerance (default ``settings.ELLIPTIC_TOL``)
        max_iter: Iteration cap (default ``settings.ELLIPTIC_MAX_ITER``)

    Returns:
        AGM(a, b)
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"agm requires positive arguments, got ({a}, {b})", (a, b))
    tol = settings.ELLIPTIC_TOL if tol is None else tol
    max_iter = settings.ELLIPTIC_MAX_ITER if max_iter is None else max_iter

    a, b = float(a), float(b)
    for _ in range(max_iter):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k'))."""
    _check_modulus(k)
    if k == 1.0:
        raise DomainError("K(k) diverges at k = 1", k)
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def _landen_ladder(k: float) -> tuple[list[float], list[float]]:
    tol = settings.ELLIPTIC_TOL
    a = [1.0]
    c = [k]
    b = math.sqrt((1.0 - k) * (1.0 + k))
    # at least one step so phi_1 exists
    while len(a) < 2 or (abs(c[-1]) > tol * a[-1] and len(a) <= settings.ELLIPTIC_MAX_ITER):
        an, cn = a[-1], c[-1]
        a.append(0.5 * (an + b))
        c.append(0.5 * (an - b))
        b = math.sqrt(an * b)
    return a, c


def jacobi_scd(u: float, k: float) -> tuple[float, float, float]:
    """Jacobi elliptic functions (sn, cn, dn) at real ``u`` for modulus ``k``.

    Args:
        u: Real argument
        k: Modulus in [0, 1]

    Returns:
        Tuple (sn, cn, dn)
    """
    _check_modulus(k)
    u = float(u)
    if k == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if k == 1.0:
        sech = 1.0 / math.cosh(u)
        return math.tanh(u), sech, sech

    period = 4.0 * complete_K(k)
    if abs(u) > period:
        u = math.fmod(u, period)

    a, c = _landen_ladder(k)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for m in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(c[m] / a[m] * math.sin(phi)))

    sn = math.sin(phi)
    cn = math.cos(phi)
    # dn > 0 for real u; the ladder's cos ratio is 0/0 at odd multiples of K
    dn = math.sqrt(max(0.0, (1.0 - k * sn) * (1.0 + k * sn)))
    return sn, cn, dn


def inverse_sn(s: float, k: float) -> float:
    """Smallest u in [0, K(k)] with sn(u, k) = s, for s in [0, 1].

    sn is increasing on [0, K]; the root is bracketed and found by bisection.
    """
    _check_modulus(k)
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"inverse_sn needs s in [0, 1], got {s}", s)
    if k == 1.0:
        if s == 1.0:
            raise DomainError("sn(u, 1) = 1 has no finite solution", s)
        return math.atanh(s)
    if k == 0.0:
        return math.asin(s)

    lo, hi = 0.0, complete_K(k)
    if s == 1.0:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if jacobi_scd(mid, k)[0] < s:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.0 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)
