"""Configuration management for the Guichard net laboratory."""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-driven configuration for builders, verifiers and the CLI."""

    # Integration
    RK_STEP: float = 1e-4  # fixed RK4 step on xi
    POSITIVITY_FLOOR: float = 1e-12  # integration stops when some l_i^2 drops below this

    # Finite differences (steps are relative to the box extent per axis)
    FD_REL_STEP: float = 1e-5
    SECOND_ORDER_REL_STEP: float = 1e-3  # outer step of nested differences
    HESSIAN_REL_STEP: float = 1e-2  # second differences of l on finite-difference nets
    CYCLIC_REL_STEP: float = 2e-3
    SINGULARITY_GUARD: float = 1e-9

    # Sample grids
    GRID_POINTS: int = 9
    GRID_INSET: float = 0.05
    LEVEL_SET_POINTS: int = 50
    DEFAULT_SEED: int = 0

    # Tolerances
    FIRST_ORDER_TOL: float = 1e-8
    FD_FIRST_ORDER_TOL: float = 1e-6  # finite-difference nets
    SECOND_ORDER_TOL: float = 1e-6
    CYCLIC_TOL: float = 1e-9
    PHI_TOL: float = 1e-7
    CURVATURE_TOL: float = 1e-9

    # Special functions
    ELLIPTIC_TOL: float = 1e-15
    ELLIPTIC_MAX_ITER: int = 50

    # Symbolic engine
    REWRITE_MAX_PASSES: int = 100
    VERIFY_CONCURRENCY: int = 4

    # Caching of built nets
    ENABLE_CACHE: bool = True
    CACHE_TTL: int = 3600  # 1 hour

    # Logging
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


@lru_cache
def get_settings() -> Settings:
    """Return a cached Settings instance."""
    return Settings()


# Convenience instance for modules that import `settings` directly
settings: Settings = get_settings()
