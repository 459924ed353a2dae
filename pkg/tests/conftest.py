import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from logictrace.synthetic import InstanceGenerator


@pytest.fixture(scope="session")
def small_instances():
    """A quick seeded batch for module-level property tests."""
    return InstanceGenerator(seed=7).generate_many(100)


@pytest.fixture(scope="session")
def generator():
    return InstanceGenerator(seed=7)
