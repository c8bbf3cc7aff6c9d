import numpy as np
import pytest

from ucme.archive import ArchiveConfig
from ucme.domain import DomainConfig, apartment_spec, parse_design_spec
from ucme.engine import SessionConfig, init_session

STUDIO_DOC = {
    "bounds": {"width": 8.0, "height": 7.0},
    "units": [
        {"id": 1, "name": "Room", "kind": "interior", "area": 16,
         "entrances": 1, "windows": 1},
        {"id": 2, "name": "Patio", "kind": "exterior", "area": 8},
        {"id": 3, "name": "Hall", "kind": "interior", "area": 6},
    ],
    "adjacencies": [[1, 2], [1, 3]],
}


@pytest.fixture(scope="session")
def apartment():
    return apartment_spec()


@pytest.fixture(scope="session")
def studio():
    return parse_design_spec(STUDIO_DOC)


@pytest.fixture(scope="session")
def studio_config():
    return SessionConfig(
        domain=DomainConfig(sites=70),
        archive=ArchiveConfig(resolution=64),
        window_size=9,
        evals_per_selection=200,
        initial_individuals=30,
        warmup_eval_cap=60_000,
        seed=11,
    )


@pytest.fixture(scope="session")
def warm_studio(studio, studio_config):
    """One warmed session shared by engine tests (cloned, never mutated)."""
    return init_session(studio, studio_config)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
