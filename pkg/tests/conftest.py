import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "workbench",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("workbench")


@pytest.fixture(scope="session")
def tables():
    """Shared arithmetic tables for desk-scale tests (limit 1e5)."""
    from bvlab.tables import get_tables

    return get_tables(10 ** 5)


@pytest.fixture(scope="session")
def big_tables():
    """Tables at the full sweep scale 1e7 (segmented sieve, sub-second)."""
    from bvlab.tables import get_tables

    return get_tables(10 ** 7)
