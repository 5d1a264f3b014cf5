from pathlib import Path

import pytest

import corpus
from bool_engine import BoolEngine

SAMPLES = Path(__file__).parent / "samples"


@pytest.fixture
def samples() -> Path:
    return SAMPLES


@pytest.fixture
def engine():
    return BoolEngine(["i1", "i2"], ["o1", "o2"])


@pytest.fixture
def a_loop():
    return corpus.a_loop()


@pytest.fixture
def a_bool():
    return corpus.a_bool()


@pytest.fixture
def a_real():
    return corpus.a_real()


@pytest.fixture
def a_single_edge():
    return corpus.a_single_edge()


@pytest.fixture
def a_split_outputs():
    return corpus.a_split_outputs()


@pytest.fixture
def a_passing_buchi():
    return corpus.a_passing_buchi()


@pytest.fixture(scope="session")
def small_corpus():
    return corpus.random_corpus(seed=7, count=25, max_states=4, max_inputs=2, max_outputs=2)
