import os

import numpy as np
import pytest


@pytest.fixture(scope="session", autouse=True)
def log_dir(tmp_path_factory):
    """Keep CLI log files out of the working tree"""
    path = tmp_path_factory.mktemp("logs")
    os.environ["ITERSCB_LOG_DIR"] = str(path)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(42)
