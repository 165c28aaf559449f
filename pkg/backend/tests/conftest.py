# tests/conftest.py
import pytest

from backend.engines import gf, sogroup, zipcox
from backend.models.models import PsiKind


@pytest.fixture
def seed():
    return 1234


@pytest.fixture
def gf5():
    return gf.field_spec(5)


@pytest.fixture
def gf9():
    return gf.field_spec(3, 2)


@pytest.fixture
def datum():
    """Zip datum of SO(n,2) for a given n and psi."""

    def build(n, psi_kind=PsiKind.IDENTITY):
        return zipcox.orthogonal_datum(n, psi_kind)

    return build


@pytest.fixture
def gram():
    """Gram specification J_{n+2} over GF(p^2)."""

    def build(n, p=5, c=1, nonsplit=False):
        return sogroup.gram_spec(n, p, c=c, nonsplit=nonsplit)

    return build
