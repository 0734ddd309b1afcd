import pytest

from pcwave import verify


@pytest.fixture(scope="session")
def session():
    """Scenario runs shared across test modules (each built-in evolves once)."""
    return verify.Session()
