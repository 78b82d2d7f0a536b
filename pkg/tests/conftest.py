import numpy as np
import pytest

from mfreqlab import _backend


def _available():
    names = ["python"]
    try:
        _backend.get("cython")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


BACKENDS = _available()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
