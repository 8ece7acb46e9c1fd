import pytest

from forcinglab.ordinals import Ordinal


@pytest.fixture
def O():
    return Ordinal.parse
