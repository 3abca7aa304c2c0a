import pytest

from gnep import corpus


@pytest.fixture
def pd():
    return corpus.prisoners_dilemma().economy


@pytest.fixture
def link():
    return corpus.shared_link_game().economy


@pytest.fixture
def locked():
    return corpus.locked_pair_game().economy


@pytest.fixture
def bng():
    return corpus.bigger_number_game(9).economy
