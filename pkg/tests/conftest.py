import random

import pytest

from epsfta.config import bundled_file
from epsfta.utils.component_library import ComponentLibrary
from epsfta.utils.tree_file import load_tree
from tests.helpers import make_tree, random_coherent_tree

EPS_CUT_SETS = [
    {'BUS-1'}, {'CAP-1'}, {'Event12'}, {'Event15'}, {'Event18'}, {'Event24'}, {'Event25'}, {'FD-1'},
    {'Event13', 'Event16'}, {'Event13', 'Event17'}, {'Event14', 'Event16'}, {'Event14', 'Event17'},
]


@pytest.fixture
def library():
    return ComponentLibrary.load(bundled_file('components'))


@pytest.fixture
def eps_loaded(library):
    return load_tree(bundled_file('eps_example'), library)


@pytest.fixture
def fixture_or_of_and_tree():
    tree = make_tree({'TOP': ('or', ['G1', 'C']), 'G1': ('and', ['A', 'B'])})
    correct_cutsets = [{'C'}, {'A', 'B'}]
    return tree, correct_cutsets


@pytest.fixture
def fixture_and_of_or_tree():
    tree = make_tree({'TOP': ('and', ['A', 'G1']), 'G1': ('or', ['B', 'C'])})
    correct_cutsets = [{'A', 'B'}, {'A', 'C'}]
    return tree, correct_cutsets


@pytest.fixture
def fixture_eps_tree(eps_loaded):
    return eps_loaded.tree, EPS_CUT_SETS


@pytest.fixture(scope='session')
def random_trees():
    rng = random.Random(20240611)
    return [random_coherent_tree(rng) for _ in range(200)]
