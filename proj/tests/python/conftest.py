import os
import sys

import pytest


def _load_module():
    try:
        import rrrekf

        return rrrekf
    except ImportError:
        pass
    # development tree: the extension lives in the CMake build directory
    build_dir = os.environ.get("RRREKF_PYMODULE_DIR")
    if build_dir:
        sys.path.insert(0, build_dir)
    import _core

    return _core


@pytest.fixture(scope="session")
def rrr():
    return _load_module()
