"""
Configuration settings for lorentz-lab
"""

from contextlib import contextmanager
from typing import Iterator, Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Library and service settings"""

    # Application Configuration
    app_name: str = "lorentz-lab"
    app_version: str = "0.1.0"
    debug: bool = False
    log_level: str = "INFO"
    log_json: bool = True

    # Numerical tolerances
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    drop_tol: float = 1e-15
    renormalize_every: int = 64

    # Experiment execution
    max_workers: int = 4

    # Server Configuration
    host: str = "0.0.0.0"
    port: int = 8000
    reload: bool = False

    class Config:
        env_file = ".env"
        env_prefix = "LORENTZ_LAB_"
        case_sensitive = False


# Global settings instance
settings = Settings()


def tolerance(scale: float = 0.0) -> float:
    """Absolute plus relative tolerance for a quantity of the given magnitude"""
    return settings.abs_tol + settings.rel_tol * abs(scale)


@contextmanager
def tolerance_scope(
    abs_tol: Optional[float] = None, rel_tol: Optional[float] = None
) -> Iterator[Settings]:
    """Temporarily override the invariant-check tolerances"""
    previous = (settings.abs_tol, settings.rel_tol)
    try:
        if abs_tol is not None:
            settings.abs_tol = abs_tol
        if rel_tol is not None:
            settings.rel_tol = rel_tol
        yield settings
    finally:
        settings.abs_tol, settings.rel_tol = previous
