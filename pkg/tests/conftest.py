from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from dsem.fixtures import book_schedule_lexicon

DATA = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def toy_corpus() -> Path:
    return Path(resources.files("dsem") / "data" / "toy.conllu")


@pytest.fixture(scope="session")
def fixture_lexicon():
    return book_schedule_lexicon()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA
