import os
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SEED = int(os.environ.get("QLATTICE_TEST_SEED", "20261018"))


@pytest.fixture
def rng():
    return random.Random(SEED)
