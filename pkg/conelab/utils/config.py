"""
Runtime settings for conelab.

Values come from the process environment after an optional ``.env`` file has
been merged in. CLI flags override them field by field.
"""

import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    eps: float = Field(default=1e-9, gt=0)
    samples: int = Field(default=100_000, gt=0)
    seed: int = 0
    log_level: str = "INFO"


_ENV_NAMES = {
    "threads": "CONELAB_THREADS",
    "eps": "CONELAB_EPS",
    "samples": "CONELAB_SAMPLES",
    "seed": "CONELAB_SEED",
    "log_level": "CONELAB_LOG_LEVEL",
}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once per process."""
    load_dotenv()
    raw = {field: os.getenv(name) for field, name in _ENV_NAMES.items()}
    try:
        return Settings(**{k: v for k, v in raw.items() if v is not None})
    except ValidationError as e:
        logger.error(f"Invalid conelab environment settings: {e}")
        raise ValueError(f"Invalid conelab environment settings: {e}") from e
