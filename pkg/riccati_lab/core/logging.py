import logging
import logging.config
from pathlib import Path

from riccati_lab.core.config import settings


def setup_logging(config_path: str | None = None) -> None:
    path = Path(config_path or settings.LOG_CONFIG)
    if path.is_file():
        logging.config.fileConfig(path, disable_existing_loggers=False)
    else:
        logging.basicConfig(
            level=settings.LOG_LEVEL.upper(),
            format="%(levelname)-5.5s [%(name)s] %(message)s",
        )
