import math
from typing import Callable

from riccati_lab.core.errors import InputError
from riccati_lab.models.generators import (
    composite_surrogate,
    heat_boundary_surrogate,
    random_stable,
    scalar_model,
)
from riccati_lab.models.lq_model import LqModel

SHIPPED: dict[str, Callable[[float], LqModel]] = {
    "scalar": lambda T: scalar_model(horizon=T),
    "heat": lambda T: heat_boundary_surrogate(8, 0.25, horizon=T),
    "composite": lambda T: composite_surrogate(4, 4, 0.5, 0.1, horizon=T),
    "random": lambda T: random_stable(8, 2, 3, seed=7, margin=0.5, horizon=T),
}


def shipped_model(name: str, horizon: float = math.inf) -> LqModel:
    try:
        factory = SHIPPED[name]
    except KeyError:
        raise InputError(f"unknown model {name!r}; shipped: {', '.join(SHIPPED)}")
    return factory(horizon)


def shipped_models(horizon: float = math.inf) -> list[LqModel]:
    return [factory(horizon) for factory in SHIPPED.values()]
