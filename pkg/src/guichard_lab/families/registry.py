"""Family specs loaded from JSON and turned into nets.

A spec is one JSON object whose ``type`` selects the family:

    {"type": "translation", "alpha": [...], "c": [...], "lambda": -4, "l1_0": 1,
     "xi_range": [-0.25, 0.3]}
    {"type": "one_constant", "case": "a", "lambda": 1, "b": 1, "xi0": 0, "alpha": [1, 1],
     "domain": [[-1, 1], [0.5, 1.5], [0.5, 1.5]]}
    {"type": "dilation", "case": "a", "a": [0, 1, 0], "b": [0, 0, 1], "lambda": 1, "C0": 1,
     "domain": [[-1, 1], [-2, -1], [1, 2]]}
    {"type": "constant", "l": [1, 1, 1]}

Every spec may add ``"derivatives": "finite_difference"`` (with optional ``"fd_step"``)
and a ``"transform"`` object with ``translate``, ``dilate_x`` and ``dilate_l`` entries,
applied in that order.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from ..core.errors import ConfigError
from ..lame.net import Box, DerivativeMode, GuichardNet, constant_net, dilate_l, dilate_x, translate
from .dilation import DilationConstants, build_dilation_family
from .one_constant import OneConstantFamily, build_one_constant_family
from .translation import TranslationConstants, build_translation_family

logger = logging.getLogger(__name__)

Interval = tuple[float, float]


class TransformSpec(BaseModel):
    """Group action applied to the built net."""

    model_config = ConfigDict(extra="forbid")

    translate: Optional[tuple[float, float, float]] = None
    dilate_x: Optional[float] = None
    dilate_l: Optional[float] = None


class _SpecBase(BaseModel):
    domain: Optional[tuple[Interval, Interval, Interval]] = None
    derivatives: Literal["exact", "finite_difference"] = "exact"
    fd_step: Optional[float] = Field(default=None, gt=0)
    transform: Optional[TransformSpec] = None

    def box(self) -> Optional[Box]:
        return None if self.domain is None else Box.from_intervals(self.domain)

    def family_fields(self) -> dict:
        return self.model_dump(by_alias=True, exclude={"type", "domain", "derivatives", "fd_step", "transform", "xi_range", "clip"})


class TranslationSpec(_SpecBase, TranslationConstants):
    type: Literal["translation"]
    xi_range: Interval
    clip: bool = False


class OneConstantSpec(_SpecBase, OneConstantFamily):
    type: Literal["one_constant"]


class DilationSpec(_SpecBase, DilationConstants):
    type: Literal["dilation"]


class ConstantSpec(_SpecBase):
    type: Literal["constant"]
    l: tuple[float, float, float]

    @field_validator("l")
    @classmethod
    def _nonzero(cls, v):
        if any(x == 0 for x in v):
            raise ValueError("constant l must be nonzero")
        return v


FamilySpec = Annotated[
    Union[TranslationSpec, OneConstantSpec, DilationSpec, ConstantSpec],
    Field(discriminator="type"),
]
_adapter = TypeAdapter(FamilySpec)


def parse_family_spec(data: dict) -> FamilySpec:
    """Validate a decoded JSON object as a family spec."""
    try:
        return _adapter.validate_python(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid family spec: {e}") from e


def load_family_spec(path: str | Path) -> tuple[FamilySpec, dict]:
    """Read and validate a spec file.

    Returns:
        (validated spec, raw decoded JSON)
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Spec file not found: {path}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read spec file {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"Spec file {path} must hold a JSON object")
    return parse_family_spec(raw), raw


def build_net(spec: FamilySpec) -> GuichardNet:
    """Build the net a spec describes, then apply its derivative mode and transform."""
    box = spec.box()
    if isinstance(spec, TranslationSpec):
        tc = TranslationConstants(**spec.family_fields())
        net = build_translation_family(tc, spec.xi_range, domain=box, clip=spec.clip)
    elif isinstance(spec, OneConstantSpec):
        if box is None:
            raise ConfigError("one_constant specs need a domain")
        net = build_one_constant_family(OneConstantFamily(**spec.family_fields()), box)
    elif isinstance(spec, DilationSpec):
        if box is None:
            raise ConfigError("dilation specs need a domain")
        net = build_dilation_family(DilationConstants(**spec.family_fields()), box)
    else:
        net = constant_net(spec.l, box or Box((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)))

    if spec.derivatives == "finite_difference":
        net = net.with_mode(DerivativeMode.finite_difference(spec.fd_step))

    t = spec.transform
    if t is not None:
        if t.translate is not None:
            net = translate(net, t.translate)
        if t.dilate_x is not None:
            net = dilate_x(net, t.dilate_x)
        if t.dilate_l is not None:
            net = dilate_l(net, t.dilate_l)
    logger.info(f"Built {net.family} net on {net.domain}")
    return net
