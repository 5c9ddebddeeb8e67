"""On-shell reduction: rewrite first-order jets with Lame's system, then apply Guichard.

Rules (eps = (1, -1, 1), {i, j, k} = {1, 2, 3}):

    l_{i,x_j}  -> h_ij l_j                                        (i != j)
    l_{i,x_i}  -> -eps_i eps_j h_ji l_j - eps_i eps_k h_ki l_k
    h_{ij,x_k} -> h_ik h_kj
    h_{ij,x_j} -> -h_{ji,x_i} - h_ik h_jk                         (i < j)
    h_{ij,x_i} -> -eps_i eps_j h_{ji,x_j} - eps_i eps_k h_ki h_kj  (i < j)

The jets left afterwards are the free ones h_{ji,x_i}, h_{ji,x_j} with i < j. The Guichard
relation is applied last as l3^2 -> l2^2 - l1^2 on the numerator, which leaves it at most
linear in l3.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Optional

from ..core.config import settings
from ..core.errors import RewriteLimitError
from .expression import ATOM_INDEX, Polynomial, normalize
from .jet import EPS, INDICES, Expr, h, h_x, l, third

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def substitution_rules() -> dict[str, Polynomial]:
    """Replacement for every jet atom that is not free."""
    rules: dict[str, Polynomial] = {}
    for i in INDICES:
        for j in INDICES:
            if i == j:
                continue
            k = third(i, j)
            rules[f"l{i}_x{j}"] = h(i, j) * l(j)
            rules[f"h{i}{j}_x{k}"] = h(i, k) * h(k, j)
            if i < j:
                rules[f"h{i}{j}_x{j}"] = -h_x(j, i, i) - h(i, k) * h(j, k)
                rules[f"h{i}{j}_x{i}"] = -EPS[i] * EPS[j] * h_x(j, i, j) - EPS[i] * EPS[k] * h(k, i) * h(k, j)
        j, k = (s for s in INDICES if s != i)
        rules[f"l{i}_x{i}"] = -EPS[i] * EPS[j] * h(j, i) * l(j) - EPS[i] * EPS[k] * h(k, i) * l(k)
    return rules


def free_jets() -> tuple[str, ...]:
    """h_{ji,x_i} and h_{ji,x_j} for i < j."""
    return tuple(f"h{j}{i}_x{s}" for i in INDICES for j in INDICES if i < j for s in (i, j))


def apply_guichard(p: Polynomial) -> Polynomial:
    """Rewrite l3^2 -> l2^2 - l1^2 in the numerator of ``p``."""
    num, den = p.numerator_denominator()
    l3 = ATOM_INDEX["l3"]
    replacement = l(2) ** 2 - l(1) ** 2
    out = Polynomial()
    for m, c in num:
        exps = dict(m)
        e = exps.pop(l3, 0)
        if e < 2:
            out = out + Polynomial({m: c})
            continue
        rest = Polynomial({tuple(sorted(exps.items())): c})
        out = out + rest * replacement ** (e // 2) * l(3) ** (e % 2)
    return out / den


def on_shell_reduce(e: Expr, max_passes: Optional[int] = None, guichard: bool = True) -> Polynomial:
    """Apply the substitutions until no rewritable jet remains, then the Guichard rewrite.

    Raises:
        RewriteLimitError: no fixpoint after ``max_passes`` passes
    """
    max_passes = settings.REWRITE_MAX_PASSES if max_passes is None else max_passes
    rules = substitution_rules()
    p = normalize(e)
    passes = 0
    while True:
        pending = {name: rules[name] for name in p.atoms() if name in rules}
        if not pending:
            break
        if passes >= max_passes:
            raise RewriteLimitError(f"On-shell reduction still rewriting {sorted(pending)} after {passes} passes")
        p = p.substitute(pending)
        passes += 1
    logger.debug(f"On-shell reduction reached a fixpoint after {passes} pass(es)")
    return apply_guichard(p) if guichard else p
