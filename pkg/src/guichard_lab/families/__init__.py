"""Group-invariant solution families."""
from .dilation import DilationConstants, build_dilation_family
from .one_constant import OneConstantFamily, build_one_constant_family
from .registry import build_net, load_family_spec, parse_family_spec
from .translation import (
    TranslationConstants,
    admissible_xi_interval,
    build_translation_family,
    classify_regime,
    closed_form_l1,
    conserved_quantities,
    integrate_translation_profile,
)

__all__ = [
    "TranslationConstants",
    "integrate_translation_profile",
    "admissible_xi_interval",
    "build_translation_family",
    "conserved_quantities",
    "classify_regime",
    "closed_form_l1",
    "OneConstantFamily",
    "build_one_constant_family",
    "DilationConstants",
    "build_dilation_family",
    "parse_family_spec",
    "load_family_spec",
    "build_net",
]
