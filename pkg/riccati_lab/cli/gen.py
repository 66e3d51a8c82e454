import logging

from riccati_lab.cli.dependencies import build_model, output_path
from riccati_lab.core.errors import InputError
from riccati_lab.schemas.config import ModelSource, RunConfig
from riccati_lab.storage.model_file import save_model

logger = logging.getLogger(__name__)


def cmd_gen(config: RunConfig) -> int:
    if config.model.source == ModelSource.file:
        raise InputError("gen needs a generator: heat, composite, random or scalar")
    model = build_model(config)
    path = config.output.model or output_path(config, f"{model.model_id}.model")
    save_model(model, path)
    logger.info("generated %s (n=%d, m=%d, p=%d)", model.model_id, model.n, model.m, model.p)
    print(model.model_id)
    return 0
