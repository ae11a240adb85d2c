import numpy as np
import pytest

from fishersep.models import ManifoldKind, SyntheticSpec
from fishersep.synthdata import generate


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sphere_points():
    """800 uniform points on the unit sphere of R^6."""
    spec = SyntheticSpec(kind=ManifoldKind.sphere, intrinsic_dim=5, embed_dim=6, cardinality=800, seed=11)
    return generate(spec)


@pytest.fixture
def write_csv(tmp_path):
    def write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


def pytest_addoption(parser):
    parser.addoption("--timing", action="store_true", default=False, help="run wall-clock checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--timing"):
        return
    skip = pytest.mark.skip(reason="needs --timing")
    for item in items:
        if "timing" in item.keywords:
            item.add_marker(skip)
