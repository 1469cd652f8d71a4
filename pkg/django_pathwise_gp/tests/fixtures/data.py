import numpy as np
import pytest

from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.data.synthetic import sinusoid_dataset


@pytest.fixture
def toy_data() -> Dataset:
    """
    Fixture providing a small 1D regression problem on [-3, 3].

    Returns:
        Dataset: 64 noisy observations of sin(2x) + cos(5x).
    """
    return sinusoid_dataset(64, seed=3, noise_variance=0.1)


@pytest.fixture
def random_data() -> Dataset:
    """
    Fixture providing 32 uniformly drawn 2D inputs with Gaussian targets.

    Returns:
        Dataset: Inputs in [0, 1]^2 and standard normal targets.
    """
    rng = np.random.default_rng(11)
    return Dataset(rng.random((32, 2)), rng.standard_normal(32))


@pytest.fixture
def csv_file(tmp_path) -> str:
    """
    Fixture writing a small CSV file with a header and two input columns.

    Args:
        tmp_path: Pytest's temporary directory.

    Returns:
        str: Path of the CSV file; its target column is named ``y``.
    """
    path = tmp_path / "data.csv"
    path.write_text("a,b,y\n0.0,1.0,2.0\n1.0,0.5,1.5\n2.0,0.0,-1.0\n3.0,1.5,0.5\n")
    return str(path)
