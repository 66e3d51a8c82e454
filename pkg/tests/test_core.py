import runpy
import warnings
from pathlib import Path

import numpy as np
import pytest
from pydantic.warnings import PydanticDeprecatedSince20

import riccati_lab
from riccati_lab.core.errors import (
    ConvergenceError,
    HorizonMismatch,
    InputError,
    LabError,
    NoSingularComponent,
    SolverError,
)
from riccati_lab.core.parallel import ordered_map
from riccati_lab.core.seeding import sub_seed, unit_probes


def test_sub_seeds_are_reproducible_and_distinct():
    assert sub_seed(0, 3) == sub_seed(0, 3)
    seeds = {sub_seed(0, k) for k in range(100)}
    assert len(seeds) == 100
    assert sub_seed(1, 0) != sub_seed(0, 0)


def test_unit_probes_start_with_basis():
    probes = unit_probes(3, 5, seed=11)
    assert probes.shape == (8, 3)
    np.testing.assert_allclose(probes[:3], np.eye(3))
    np.testing.assert_allclose(np.linalg.norm(probes, axis=1), 1.0)
    np.testing.assert_array_equal(probes, unit_probes(3, 5, seed=11))
    assert unit_probes(3, 2, seed=11, with_basis=False).shape == (2, 3)


def test_ordered_map_keeps_order():
    assert ordered_map(lambda k: k * k, range(10)) == [k * k for k in range(10)]


@pytest.mark.parametrize(
    "exc, code",
    [
        (InputError("bad"), 2),
        (HorizonMismatch("horizon mismatch"), 2),
        (SolverError("diverged"), 1),
        (ConvergenceError("slow"), 1),
        (NoSingularComponent(), 1),
    ],
)
def test_exit_codes(exc, code):
    assert isinstance(exc, LabError)
    assert exc.exit_code == code


def test_exit_code_override():
    assert LabError("custom", exit_code=3).exit_code == 3
    assert NoSingularComponent().detail == "no singular component"


@pytest.mark.parametrize("module", ["core/config.py", "schemas/config.py", "schemas/report.py"])
def test_models_define_without_pydantic_deprecations(module):
    path = Path(riccati_lab.__file__).parent / module
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        namespace = runpy.run_path(str(path))
    assert not [w for w in caught if issubclass(w.category, PydanticDeprecatedSince20)]
    name = namespace["__name__"]
    local = [v for v in namespace.values() if getattr(v, "__module__", None) == name]
    models = [v for v in local if hasattr(v, "model_config")]
    assert models and all("Config" not in vars(model) for model in models)
