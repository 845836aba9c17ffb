import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plsembed.groups import get_catalog          # noqa: E402
from plsembed.species import build_catalogs      # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def group_cache(tmp_path_factory):
    """Keep the group catalog cache inside the test session."""
    d = tmp_path_factory.mktemp("groups")
    old = os.environ.get("PLSEMBED_CACHE")
    os.environ["PLSEMBED_CACHE"] = str(d)
    yield d
    if old is None:
        os.environ.pop("PLSEMBED_CACHE", None)
    else:
        os.environ["PLSEMBED_CACHE"] = old


@pytest.fixture(scope="session")
def species6():
    """In-memory species catalogs for sizes 1..6."""
    return build_catalogs(6)


@pytest.fixture(scope="session")
def species7():
    return build_catalogs(7)


@pytest.fixture(scope="session")
def groups24(group_cache):
    return get_catalog(24, group_cache)
