"""Nets (metric coefficients on a box) and residuals of Lame's system."""
from .net import Box, DerivativeMode, GuichardNet, constant_net, dilate_l, dilate_x, translate
from .residuals import FamilyResidual, ResidualReport, first_order_residuals, guichard_residual, h_from_l, second_order_residuals

__all__ = [
    "Box",
    "DerivativeMode",
    "GuichardNet",
    "constant_net",
    "translate",
    "dilate_x",
    "dilate_l",
    "FamilyResidual",
    "ResidualReport",
    "guichard_residual",
    "h_from_l",
    "first_order_residuals",
    "second_order_residuals",
]
