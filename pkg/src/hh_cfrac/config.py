from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Numerics
    PRECISION_BITS: int = Field(256, ge=53, description="Default working precision in bits")
    DEFAULT_ORDER_SLACK: int = Field(
        8, ge=0, description="Extra series terms added to the default truncation order"
    )
    GROWTH_MAX_VALUES: int = Field(
        20000, ge=1, description="Cap on live lambda-values per growth-profile level"
    )

    # Debug
    LOG_LEVEL: str = Field("INFO", description="Logging level: DEBUG, INFO, WARNING, ERROR")
    LOG_FORMAT: str = Field("diagnostic", description="Log rendering: diagnostic or json")

    # Pydantic v2 settings config
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="HH_",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
