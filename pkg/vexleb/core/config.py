from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # Worker pool (0 = one worker per CPU)
    threads: int = 0

    # Luxemburg norm root finding
    tol: float = 1e-10
    max_iter: int = 200
    bracket_cap: int = 200

    # Refinement policy for "finite" verdicts
    finite_growth: float = 0.10
    nonfinite_growth: float = 0.50
    refine_factor: int = 2

    # Shifted dyadic lattices
    shift_samples: int = 8

    # Dyadic reverse doubling ratios above this are flagged
    rd_warn_threshold: float = 1e3

    # Test-function generators
    generator_version: str = "2"

    # Reports
    float_digits: int = 17

    # Logging
    log_level: str = "WARNING"
    log_file: Optional[str] = None

    class Config:
        env_prefix = "VEXLEB_"
        env_file = ".env"
        case_sensitive = False


settings = Settings()
