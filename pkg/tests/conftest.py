import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from swarmkey.groups import Ed25519Group, ToyGroup

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def toy():
    return ToyGroup()


@pytest.fixture(scope="session")
def ed25519():
    return Ed25519Group()
