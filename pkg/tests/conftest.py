import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


@pytest.fixture(scope="session")
def config_dir() -> str:
    return os.path.abspath(CONFIG_DIR)
