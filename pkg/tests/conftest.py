import pathlib

import pytest

from mrmlink.runconfig import load_config

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
CANONICAL_CONFIG = REPO_ROOT / "configs" / "canonical.json"


@pytest.fixture(scope="session")
def canonical_rc():
    return load_config(CANONICAL_CONFIG)


@pytest.fixture(scope="session")
def canonical_cfg(canonical_rc):
    return canonical_rc.link
