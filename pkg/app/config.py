from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime configuration, read from LCLAB_* variables and an optional .env file."""

    model_config = SettingsConfigDict(env_prefix="LCLAB_", env_file=".env", extra="ignore")

    seed: int = Field(20240607, description="Seed for every sampled pair, triple and probe")
    default_prec: int = Field(10, ge=0, description="Precision used when a command omits --prec")
    default_budget: int = Field(100000, gt=0, description="Step budget used when a command omits --budget")
    log_level: str = Field("WARNING", description="Root log level of the command driver")
    hyper_center_limit: int = Field(16, gt=0, description="Largest star cover hyper_cover will expand into subsets")
    diagram_window: int = Field(3, gt=0, description="Coefficient bound of the brute-force diagram window")
    bounded_probe_window: int = Field(32, gt=0, description="Specials each bounded_test candidate is checked against")
    schema_version: str = Field("1", description="Version stamped into trace documents")


@lru_cache()
def get_settings() -> Settings:
    return Settings()
