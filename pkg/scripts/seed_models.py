import sys
from pathlib import Path

from riccati_lab.models.catalog import SHIPPED, shipped_model
from riccati_lab.storage.model_file import save_model


def seed(target: str = "models"):
    out = Path(target)
    for name in SHIPPED:
        model = shipped_model(name)
        path = save_model(model, out / f"{model.model_id}.model")
        print(f"{name:10s} {model.model_id:32s} {path}")


if __name__ == "__main__":
    seed(*sys.argv[1:2])
