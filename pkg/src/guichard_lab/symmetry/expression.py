"""Exact symbolic expressions over the jet space of Lame's first-order system.

Two layers:

* ``Expression`` nodes (``Const``, ``Var``, ``Add``, ``Mul``, ``Pow``) are the parse tree.
* ``Polynomial`` is the canonical form: an expanded polynomial over the atoms with
  ``Fraction`` coefficients, where only l1, l2, l3 may carry negative exponents (so the
  value is a polynomial numerator over a monomial denominator in the l's).

``normalize`` folds a tree into its canonical ``Polynomial``; two expressions are equal iff
their canonical forms compare equal, and zero normalizes to the empty polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Mapping, Optional, Union

# Atom order defines the canonical monomial order: parameters, x, l, h, then the jets.
PARAMETERS = ("a", "c", "a1", "a2", "a3")
X_ATOMS = ("x1", "x2", "x3")
L_ATOMS = ("l1", "l2", "l3")
PAIRS = tuple((i, j) for i in range(1, 4) for j in range(1, 4) if i != j)
H_ATOMS = tuple(f"h{i}{j}" for i, j in PAIRS)
L_JETS = tuple(f"l{i}_x{k}" for i in range(1, 4) for k in range(1, 4))
H_JETS = tuple(f"h{i}{j}_x{k}" for i, j in PAIRS for k in range(1, 4))

ATOMS: tuple[str, ...] = PARAMETERS + X_ATOMS + L_ATOMS + H_ATOMS + L_JETS + H_JETS
ATOM_INDEX: dict[str, int] = {name: n for n, name in enumerate(ATOMS)}
_INVERTIBLE = frozenset(ATOM_INDEX[name] for name in L_ATOMS)

# ((atom index, exponent), ...) sorted by atom index, exponents nonzero
Monomial = tuple[tuple[int, int], ...]
Number = Union[int, Fraction]


def is_atom(name: str) -> bool:
    return name in ATOM_INDEX


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for idx, e in b:
        exps[idx] = exps.get(idx, 0) + e
    return tuple(sorted((idx, e) for idx, e in exps.items() if e != 0))


def _format_number(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_monomial(m: Monomial) -> str:
    return "*".join(ATOMS[idx] if e == 1 else f"{ATOMS[idx]}^{e}" for idx, e in m)


class Polynomial:
    """Immutable Laurent polynomial (negative powers only in l1, l2, l3) with rational coefficients.

    Supports ``+``, ``-``, ``*``, integer ``**`` and ``/`` by a monomial in the l's or by
    a nonzero number.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Number]] = None):
        self._terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    self._terms[m] = Fraction(c)
        self._hash: Optional[int] = None

    # construction

    @classmethod
    def constant(cls, value: Number) -> "Polynomial":
        return cls({(): value})

    @classmethod
    def atom(cls, name: str) -> "Polynomial":
        try:
            return cls({((ATOM_INDEX[name], 1),): 1})
        except KeyError:
            raise ValueError(f"unknown atom {name!r}") from None

    @classmethod
    def coerce(cls, value: Union["Polynomial", "Expression", Number]) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, Expression):
            return normalize(value)
        if isinstance(value, (int, Fraction, Rational)):
            return cls.constant(Fraction(value))
        raise TypeError(f"cannot convert {type(value).__name__} to Polynomial")

    # inspection

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_number(self) -> bool:
        return not self._terms or set(self._terms) == {()}

    def atoms(self) -> set[str]:
        return {ATOMS[idx] for m in self._terms for idx, _ in m}

    def degree(self, name: str) -> int:
        """Largest exponent of ``name`` over the terms (0 for the zero polynomial)."""
        idx = ATOM_INDEX[name]
        return max((dict(m).get(idx, 0) for m in self._terms), default=0)

    def denominator_exponents(self) -> dict[str, int]:
        """Exponents of the monomial denominator: the largest negative power of each l."""
        out: dict[str, int] = {}
        for m in self._terms:
            for idx, e in m:
                if e < 0:
                    out[ATOMS[idx]] = max(out.get(ATOMS[idx], 0), -e)
        return out

    def numerator_denominator(self) -> tuple["Polynomial", "Polynomial"]:
        """(N, D) with D a monomial in the l's and self == N / D, N a plain polynomial."""
        den = tuple(sorted((ATOM_INDEX[name], e) for name, e in self.denominator_exponents().items()))
        num = Polynomial({_mono_mul(m, den): c for m, c in self._terms.items()})
        return num, Polynomial({den: 1})

    # arithmetic

    def __eq__(self, other) -> bool:
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __pos__(self) -> "Polynomial":
        return self

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __add__(self, other) -> "Polynomial":
        other = Polynomial.coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = Polynomial.coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def inverse(self) -> "Polynomial":
        """1 / self for a nonzero number or a monomial in l1, l2, l3."""
        if self.is_zero():
            raise ZeroDivisionError("division by zero")
        if not self.is_monomial():
            raise ValueError(f"cannot divide by the non-monomial {self}")
        (m, c), = self._terms.items()
        if any(idx not in _INVERTIBLE for idx, _ in m):
            raise ValueError(f"only monomials in l1, l2, l3 are invertible, not {self}")
        return Polynomial({tuple((idx, -e) for idx, e in m): 1 / c})

    def __truediv__(self, other) -> "Polynomial":
        return self * Polynomial.coerce(other).inverse()

    def __rtruediv__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** -n
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # calculus and substitution

    def derivative(self, name: str) -> "Polynomial":
        """Formal partial derivative, every atom independent."""
        idx = ATOM_INDEX[name]
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.get(idx, 0)
            if e == 0:
                continue
            exps[idx] = e - 1
            key = tuple(sorted((i, x) for i, x in exps.items() if x != 0))
            out[key] = out.get(key, 0) + c * e
        return Polynomial(out)

    def substitute(self, replacements: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Replace atoms simultaneously; replaced atoms must appear with nonnegative powers
        unless their replacement is invertible."""
        targets = {ATOM_INDEX[name]: Polynomial.coerce(p) for name, p in replacements.items()}
        if not targets:
            return self
        result = Polynomial()
        cache: dict[tuple[int, int], Polynomial] = {}
        for m, c in self._terms.items():
            kept: list[tuple[int, int]] = []
            term = Polynomial.constant(c)
            for idx, e in m:
                if idx in targets:
                    key = (idx, e)
                    if key not in cache:
                        cache[key] = targets[idx] ** e
                    term = term * cache[key]
                else:
                    kept.append((idx, e))
            result = result + term * Polynomial({tuple(kept): 1})
        return result

    def evaluate(self, values: Mapping[str, float]) -> float:
        """Float value with every atom that occurs bound in ``values``."""
        total = 0.0
        for m, c in self._terms.items():
            term = float(c)
            for idx, e in m:
                term *= float(values[ATOMS[idx]]) ** e
            total += term
        return total

    # printing

    def to_expression(self) -> "Expression":
        """Canonical tree: a sum of products of a constant and atom powers, over the denominator."""
        num, den = self.numerator_denominator()
        terms: list[Expression] = []
        for m, c in num:
            factors: list[Expression] = [] if c == 1 and m else [Const(c)]
            factors.extend(Var(ATOMS[idx]) if e == 1 else Pow(Var(ATOMS[idx]), e) for idx, e in m)
            terms.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
        tree: Expression = Const(Fraction(0)) if not terms else terms[0] if len(terms) == 1 else Add(tuple(terms))
        if den.is_number():
            return tree
        ((dm, _),) = den._terms.items()
        den_factors = tuple(Var(ATOMS[idx]) if e == 1 else Pow(Var(ATOMS[idx]), e) for idx, e in dm)
        den_tree = den_factors[0] if len(den_factors) == 1 else Mul(den_factors)
        return Mul((tree, Pow(den_tree, -1)))

    def __str__(self) -> str:
        num, den = self.numerator_denominator()
        if num.is_zero():
            return "0"
        parts: list[str] = []
        for m, c in num:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not m:
                body = _format_number(mag)
            elif mag == 1:
                body = _format_monomial(m)
            else:
                body = f"{_format_number(mag)}*{_format_monomial(m)}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        if den.is_number():
            return text
        ((dm, _),) = den._terms.items()
        return f"({text})/({_format_monomial(dm)})"

    def __repr__(self) -> str:
        return f"Polynomial('{self}')"


@dataclass(frozen=True)
class Expression:
    """Parse-tree node; ``normalize`` gives the canonical form."""

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expression):
    value: Fraction

    def __str__(self) -> str:
        text = _format_number(self.value)
        return f"({text})" if self.value < 0 or self.value.denominator != 1 else text


@dataclass(frozen=True)
class Var(Expression):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Add(Expression):
    terms: tuple[Expression, ...]

    def __str__(self) -> str:
        return "(" + " + ".join(str(t) for t in self.terms) + ")"


@dataclass(frozen=True)
class Mul(Expression):
    factors: tuple[Expression, ...]

    def __str__(self) -> str:
        return "*".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: int

    def __str__(self) -> str:
        base = str(self.base)
        if not isinstance(self.base, (Var, Const)):
            base = f"({base})"
        return f"{base}^{self.exponent}" if self.exponent >= 0 else f"{base}^({self.exponent})"


def normalize(expr: Union[Expression, Polynomial]) -> Polynomial:
    """Canonical form of a tree.

    Raises:
        ValueError: a negative power of something other than a monomial in l1, l2, l3
    """
    if isinstance(expr, Polynomial):
        return expr
    if isinstance(expr, Const):
        return Polynomial.constant(expr.value)
    if isinstance(expr, Var):
        return Polynomial.atom(expr.name)
    if isinstance(expr, Add):
        total = Polynomial()
        for t in expr.terms:
            total = total + normalize(t)
        return total
    if isinstance(expr, Mul):
        product = Polynomial.constant(1)
        for f in expr.factors:
            product = product * normalize(f)
        return product
    if isinstance(expr, Pow):
        return normalize(expr.base) ** expr.exponent
    raise TypeError(f"not an expression: {expr!r}")


def to_text(expr: Union[Expression, Polynomial]) -> str:
    """Canonical text; parsing it back normalizes to the same polynomial."""
    return str(normalize(expr))


ZERO = Polynomial()
ONE = Polynomial.constant(1)
