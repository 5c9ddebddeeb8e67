"""Vector fields on (x, l, h) and their first prolongation.

    V = sum_i xi^i d/dx_i + sum_i eta^i d/dl_i + sum_{i != j} phi^ij d/dh_ij

    pr V adds  eta^{i,k} d/dl_{i,x_k}  and  phi^{ij,k} d/dh_{ij,x_k}  with

    eta^{i,k}  = D_k eta^i  - sum_r D_k(xi^r) l_{i,x_r}
    phi^{ij,k} = D_k phi^ij - sum_r D_k(xi^r) h_{ij,x_r}
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Union

from ..core.errors import ConfigError, ParseError
from .expression import ATOMS, PAIRS, ZERO, Polynomial, normalize
from .jet import INDICES, JET_ATOMS, Expr, differentiate, h, h_x, l, l_x, param, total_derivative, x
from .parser import parse

logger = logging.getLogger(__name__)

_COMPONENT = re.compile(r"^(xi[123]|eta[123]|phi(?:12|13|21|23|31|32))$")


@dataclass(frozen=True)
class VectorFieldAnsatz:
    """Coefficients of V; ``phi`` is keyed by 1-based pairs (i, j), i != j."""

    xi: tuple[Polynomial, Polynomial, Polynomial]
    eta: tuple[Polynomial, Polynomial, Polynomial]
    phi: Mapping[tuple[int, int], Polynomial] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(normalize(e) for e in self.xi))
        object.__setattr__(self, "eta", tuple(normalize(e) for e in self.eta))
        object.__setattr__(self, "phi", {pair: normalize(self.phi.get(pair, ZERO)) for pair in PAIRS})
        if len(self.xi) != 3 or len(self.eta) != 3:
            raise ValueError("xi and eta need three components each")
        for label, coeff in self.components().items():
            jets = coeff.atoms() & JET_ATOMS
            if jets:
                raise ValueError(f"{label} depends on jet atoms {sorted(jets)}; coefficients live on (x, l, h)")

    def components(self) -> dict[str, Polynomial]:
        out = {f"xi{i}": self.xi[i - 1] for i in INDICES}
        out.update({f"eta{i}": self.eta[i - 1] for i in INDICES})
        out.update({f"phi{i}{j}": self.phi[(i, j)] for i, j in PAIRS})
        return out

    def with_components(self, overrides: Mapping[str, Expr], name: Optional[str] = None) -> "VectorFieldAnsatz":
        """Copy with some components replaced, keyed like ``components()``."""
        xi = list(self.xi)
        eta = list(self.eta)
        phi = dict(self.phi)
        for label, value in overrides.items():
            if not _COMPONENT.match(label):
                raise ValueError(f"unknown component {label!r}")
            if label.startswith("xi"):
                xi[int(label[2]) - 1] = value
            elif label.startswith("eta"):
                eta[int(label[3]) - 1] = value
            else:
                phi[(int(label[3]), int(label[4]))] = value
        return replace(self, xi=tuple(xi), eta=tuple(eta), phi=phi, name=name or self.name)

    def __str__(self) -> str:
        return "; ".join(f"{k} = {v}" for k, v in self.components().items())


def zero_field() -> VectorFieldAnsatz:
    return VectorFieldAnsatz(xi=(ZERO, ZERO, ZERO), eta=(ZERO, ZERO, ZERO), name="zero")


def builtin_generator() -> VectorFieldAnsatz:
    """xi^i = a x_i + a_i, eta^i = c l_i, phi^ij = -a h_ij with symbolic a, c, a_1..a_3."""
    a, c = param("a"), param("c")
    return VectorFieldAnsatz(
        xi=tuple(a * x(i) + param(f"a{i}") for i in INDICES),
        eta=tuple(c * l(i) for i in INDICES),
        phi={(i, j): -a * h(i, j) for i, j in PAIRS},
        name="builtin",
    )


@dataclass(frozen=True)
class ProlongedField:
    """pr V: a coefficient for every atom of the jet space (parameters get none)."""

    source: VectorFieldAnsatz
    coefficients: Mapping[str, Polynomial]

    def coefficient(self, atom: str) -> Polynomial:
        return self.coefficients.get(atom, ZERO)

    def apply(self, expr: Expr) -> Polynomial:
        """pr V (expr) = sum over atoms of coefficient * d expr / d atom."""
        p = normalize(expr)
        result = ZERO
        for atom in sorted(p.atoms(), key=ATOMS.index):
            coeff = self.coefficient(atom)
            if coeff.is_zero():
                continue
            result = result + coeff * differentiate(p, atom)
        return result


def prolong_first(v: VectorFieldAnsatz) -> ProlongedField:
    """First prolongation of ``v``."""
    coefficients: dict[str, Polynomial] = {}
    for k in INDICES:
        coefficients[f"x{k}"] = v.xi[k - 1]
    for i in INDICES:
        coefficients[f"l{i}"] = v.eta[i - 1]
    for i, j in PAIRS:
        coefficients[f"h{i}{j}"] = v.phi[(i, j)]

    dxi = {(r, k): total_derivative(v.xi[r - 1], k) for r in INDICES for k in INDICES}
    for i in INDICES:
        for k in INDICES:
            coeff = total_derivative(v.eta[i - 1], k)
            for r in INDICES:
                coeff = coeff - dxi[(r, k)] * l_x(i, r)
            coefficients[f"l{i}_x{k}"] = coeff
    for i, j in PAIRS:
        for k in INDICES:
            coeff = total_derivative(v.phi[(i, j)], k)
            for r in INDICES:
                coeff = coeff - dxi[(r, k)] * h_x(i, j, r)
            coefficients[f"h{i}{j}_x{k}"] = coeff
    logger.debug(f"Prolonged {v.name} field: {sum(not c.is_zero() for c in coefficients.values())} nonzero coefficients")
    return ProlongedField(source=v, coefficients=coefficients)


def parse_ansatz(text: str, base: Optional[VectorFieldAnsatz] = None) -> VectorFieldAnsatz:
    """Read ``name = expression`` lines (``#`` starts a comment).

    Names are xi1..xi3, eta1..eta3 and phi12..phi32; components that are not assigned keep
    their value in ``base`` (the built-in generator by default).

    Raises:
        ParseError: malformed line, unknown component, repeated assignment or bad expression
    """
    base = builtin_generator() if base is None else base
    overrides: dict[str, Polynomial] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'component = expression'", len(line.rstrip()))
        lhs, rhs = line.split("=", 1)
        label = lhs.strip()
        if not _COMPONENT.match(label):
            raise ParseError(f"line {lineno}: unknown component {label!r}", len(lhs) - len(lhs.lstrip()))
        if label in overrides:
            raise ParseError(f"line {lineno}: {label} assigned twice", len(lhs) - len(lhs.lstrip()))
        start = len(lhs) + 1
        try:
            overrides[label] = normalize(parse(rhs))
        except ParseError as e:
            raise type(e)(f"line {lineno}: {e.reason}", start + e.offset) from e
        if overrides[label].atoms() & JET_ATOMS:
            raise ParseError(f"line {lineno}: {label} may not depend on jet atoms", start)
    logger.info(f"Ansatz overrides {sorted(overrides) or 'nothing'}")
    return base.with_components(overrides, name="ansatz")


def load_ansatz_file(path: Union[str, Path]) -> VectorFieldAnsatz:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read ansatz file {path}: {e}") from e
    return parse_ansatz(text)

