import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from Attractr import corpus as cp  # noqa: E402
from Attractr import model as md  # noqa: E402
from Attractr import numeric as nm  # noqa: E402


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help="run slow replication tests")


def pytest_configure(config):
    config.addinivalue_line('markers', "slow: long running replication test, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def tagged(text, subject_index=None, verb_index=None, verb_number=None, supertags=None):
    """
    'the/DT dogs/NNS bark/VBP' -> Sentence
    """
    words, tags = zip(*[x.rsplit('/', 1) for x in text.split()])
    return cp.Sentence(tokens=list(words), pos=list(tags), supertags=supertags, subject_index=subject_index,
                       verb_index=verb_index, verb_number=verb_number)


@pytest.fixture
def number_of_men():
    return tagged('The/DT number/NN of/IN men/NNS is/VBZ high/JJ ./.', 1, 4, 'SG')


@pytest.fixture
def grammar():
    return cp.load_grammar()


@pytest.fixture
def synthetic(grammar):
    return cp.generate_synthetic(grammar, 60, nm.make_rng(7, 'fixture'))


@pytest.fixture
def vocab(synthetic):
    return cp.build_vocab(synthetic, ('min_count', 1))


@pytest.fixture
def small_cfg():
    return md.ModelConfig(d=8, vocab_size=50, n_supertags=12, heads=('agreement', 'supertag', 'lm'))
