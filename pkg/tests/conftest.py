import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

HAVE_GCC = shutil.which("gcc") is not None

requires_gcc = pytest.mark.skipif(not HAVE_GCC, reason="no C compiler available")


@pytest.fixture(scope="session")
def gcc():
    if not HAVE_GCC:
        pytest.skip("no C compiler available")
    return "gcc"
