import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qrsgame.settings import FAMILIES, builtin_directions  # noqa: E402


@pytest.fixture(params=sorted(FAMILIES, key=lambda f: FAMILIES[f][0]))
def family(request):
    return request.param


@pytest.fixture
def ds(family):
    return builtin_directions(family)


@pytest.fixture
def orth2():
    return builtin_directions("orthogonal-2")


@pytest.fixture
def orth3():
    return builtin_directions("orthogonal-3")
