import pytest

from ctk.algebra import flatten
from ctk.ctmc import build
from ctk.stdlib import CROSSTALK_FIXTURES, load_fixture

CROSSTALK_ONLY = tuple(n for n in CROSSTALK_FIXTURES if n != "independent")


@pytest.fixture(scope="session")
def fixtures():
    """All six two-pathway fixtures, loaded once."""
    return {name: load_fixture(name) for name in CROSSTALK_FIXTURES}


@pytest.fixture(scope="session")
def ctmcs(fixtures):
    """Built CTMC of each fixture's system composition."""
    out = {}
    for name, fixture in fixtures.items():
        system = fixture.model.systems()[0]
        out[name] = build(flatten(system.expr, fixture.model))
    return out
