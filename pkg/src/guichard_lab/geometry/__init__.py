"""Curvatures, level surfaces, the angle phi and flat-surface forms of Guichard nets."""
from .curvature import (
    christoffel,
    coordinate_surface_curvature,
    level_set_summary,
    level_surface_grad_norm,
    level_surface_mean_curvature,
    mean_curvature_by_divergence,
)
from .hypersurface import flat_surface_forms, flat_surface_forms_general, hypersurface_metric
from .phi import cyclicity_check, phi_ode_residuals, phi_recover

__all__ = [
    "christoffel",
    "coordinate_surface_curvature",
    "level_surface_grad_norm",
    "level_surface_mean_curvature",
    "mean_curvature_by_divergence",
    "level_set_summary",
    "phi_recover",
    "phi_ode_residuals",
    "cyclicity_check",
    "hypersurface_metric",
    "flat_surface_forms",
    "flat_surface_forms_general",
]
