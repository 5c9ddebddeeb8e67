"""Guichard Lab - invariant solutions, geometry and symmetries of Lame's system under the Guichard condition."""

__version__ = "1.0.0"
__all__ = [
    "GuichardNet",
    "build_net",
    "load_family_spec",
    "first_order_residuals",
    "second_order_residuals",
    "verify_generator",
]

from .families.registry import build_net, load_family_spec
from .lame.net import GuichardNet
from .lame.residuals import first_order_residuals, second_order_residuals
from .symmetry.verify import verify_generator
