import pytest

from hygraph.cli import BUNDLED_CACHE, BUNDLED_SAMPLE, bundled
from hygraph.corpus import load_corpus
from hygraph.llm import LlmGateway


@pytest.fixture(scope="session")
def sample():
    return load_corpus(bundled(BUNDLED_SAMPLE))


@pytest.fixture(scope="session")
def gp_instance():
    return load_corpus(bundled("gp2004.jsonl"))[0]


@pytest.fixture
def replay_gw():
    return LlmGateway(mode="replay", cache_dir=bundled(BUNDLED_CACHE))
