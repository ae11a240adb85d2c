"""Runtime settings read from the environment (and an optional .env file)."""

import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from fishersep.errors import UsageError

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseModel):
    block_size: int = Field(default=512, ge=1)
    threads: int = Field(default=1, ge=1)
    out_dir: str = "results"
    log_level: str = "INFO"


def get_settings() -> Settings:
    """Build settings from FISHERSEP_* environment variables."""
    raw = {
        "block_size": os.getenv("FISHERSEP_BLOCK_SIZE", "512"),
        "threads": os.getenv("FISHERSEP_THREADS", "1"),
        "out_dir": os.getenv("FISHERSEP_OUT_DIR", "results"),
        "log_level": os.getenv("FISHERSEP_LOG_LEVEL", "INFO").upper(),
    }
    try:
        return Settings(**raw)
    except ValidationError as exc:
        raise UsageError(f"invalid FISHERSEP_* environment: {exc}") from exc


def configure_logging(level: str = "INFO") -> None:
    """Install one stream handler on the root logger."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, force=True)
