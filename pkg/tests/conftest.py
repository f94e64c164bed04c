import pytest

from src.config import BssdConfig, set_config
from src.graph.network import build_graph

from .helpers import fixture_path, load_fixture


@pytest.fixture(autouse=True)
def default_config():
    set_config(BssdConfig())
    yield
    set_config(BssdConfig())


@pytest.fixture
def example_a():
    return load_fixture("example_a.osm")


@pytest.fixture
def example_b():
    return load_fixture("example_b.osm")


@pytest.fixture
def graph_a(example_a):
    return build_graph(example_a)


@pytest.fixture
def graph_b(example_b):
    return build_graph(example_b)


@pytest.fixture
def example_a_bytes():
    return fixture_path("example_a.osm").read_bytes()
