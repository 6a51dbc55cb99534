import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from aradhati.ingest import load_astd, load_hard, load_labr, load_sanad  # noqa: E402
from aradhati.synth import write_sources  # noqa: E402


@pytest.fixture(scope="session")
def small_sources(tmp_path_factory):
    return write_sources(tmp_path_factory.mktemp("sources"), scale="small", seed=11)


@pytest.fixture(scope="session")
def ingested(small_sources):
    return {
        "ASTD": load_astd(small_sources["ASTD"]),
        "LABR": load_labr(small_sources["LABR"]),
        "HARD": load_hard(small_sources["HARD"]),
        "SANAD": load_sanad(small_sources["SANAD"]),
    }
