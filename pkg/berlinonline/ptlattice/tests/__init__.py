import os
import pathlib

import numpy as np
import pytest

from berlinonline.ptlattice.lattice import ProductCouplings

REFERENCE_POINT = ProductCouplings(0.09, 0.1, 1.0)
PATH_GRAPH_POINT = ProductCouplings(1.0, 1.0, 1.0)
GAP_POINT = (0.09, -0.01)


def build_config_path(config_name: str) -> str:
    test_folder = pathlib.Path(__file__).parent.resolve()
    return os.path.join(test_folder, "config", config_name)


@pytest.fixture
def rng():
    """Fixture for a seeded random generator, so randomized tests are reproducible.
    """
    return np.random.default_rng(1234)


@pytest.fixture
def random_points(rng):
    """Fixture for 200 product couplings drawn uniformly from [-2, 3]³.
    """
    return [ProductCouplings(*map(float, row)) for row in rng.uniform(-2.0, 3.0, size=(200, 3))]


@pytest.fixture
def temporary_output_folder(tmp_path):
    """Fixture for an empty output folder below pytest's per-test `tmp_path`.
    """
    folder = tmp_path / 'output'
    folder.mkdir()
    return str(folder)
