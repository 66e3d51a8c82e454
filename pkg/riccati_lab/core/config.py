import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    THREADS: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    LOG_CONFIG: str = "logging.ini"
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="RICCATI_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
