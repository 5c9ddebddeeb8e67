"""Jet-space atoms and derivatives.

Indices are 1-based here, matching the atom names: ``l(2)`` is l2, ``h_x(1, 2, 3)`` is
h12_x3. The total derivative

    D_k = d/dx_k + sum_i l_{i,x_k} d/dl_i + sum_{i != j} h_{ij,x_k} d/dh_ij

acts on functions of (x, l, h) and the parameters; second-order jets do not exist in this
space, so D_k of a first-jet atom is an error.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

from .expression import (
    H_JETS,
    L_JETS,
    PAIRS,
    Expression,
    Polynomial,
    X_ATOMS,
    is_atom,
    normalize,
)

INDICES = (1, 2, 3)
EPS = {1: Fraction(1), 2: Fraction(-1), 3: Fraction(1)}
JET_ATOMS = frozenset(L_JETS + H_JETS)

Expr = Union[Expression, Polynomial]


def third(i: int, j: int) -> int:
    """The index distinct from i and j."""
    return 6 - i - j


def x(k: int) -> Polynomial:
    return Polynomial.atom(f"x{k}")


def l(i: int) -> Polynomial:
    return Polynomial.atom(f"l{i}")


def h(i: int, j: int) -> Polynomial:
    return Polynomial.atom(f"h{i}{j}")


def l_x(i: int, k: int) -> Polynomial:
    return Polynomial.atom(f"l{i}_x{k}")


def h_x(i: int, j: int, k: int) -> Polynomial:
    return Polynomial.atom(f"h{i}{j}_x{k}")


def param(name: str) -> Polynomial:
    return Polynomial.atom(name)


def differentiate(e: Expr, atom: str) -> Polynomial:
    """Formal partial derivative d e / d atom, all atoms independent.

    Raises:
        ValueError: ``atom`` is not declared
    """
    if not is_atom(atom):
        raise ValueError(f"unknown atom {atom!r}")
    return normalize(e).derivative(atom)


def total_derivative(e: Expr, k: int) -> Polynomial:
    """D_k e for an expression in (x, l, h) and the parameters."""
    p = normalize(e)
    jets = p.atoms() & JET_ATOMS
    if jets:
        raise ValueError(f"D_{k} of first-order jets {sorted(jets)} needs second-order jets")
    result = p.derivative(X_ATOMS[k - 1])
    for i in INDICES:
        result = result + l_x(i, k) * p.derivative(f"l{i}")
    for i, j in PAIRS:
        result = result + h_x(i, j, k) * p.derivative(f"h{i}{j}")
    return result
