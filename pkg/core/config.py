"""Define runtime settings using Pydantic and manage environment variables."""

from logging import getLogger

from pydantic_settings import BaseSettings, SettingsConfigDict

logger = getLogger(__name__)


class Settings(BaseSettings):
    """Process-wide settings read from the environment (or ``.env``)."""

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", case_sensitive=True
    )

    LOG_LEVEL: str = "INFO"
    # Empty string disables the rotating file handler
    LOG_FILE: str = ""
    LOG_BACKUP_DAYS: int = 30

    # Thread-pool width for restarts, grid points and per-cluster evaluation
    MAX_WORKERS: int = 1

    # pytz zone name used for report timestamps
    REPORT_TIMEZONE: str = "UTC"

    def get_max_workers(self) -> int:
        """Return the configured worker count, never below one."""
        return max(1, self.MAX_WORKERS)


settings = Settings()
