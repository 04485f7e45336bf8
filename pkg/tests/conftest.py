import functools

import pytest

from teledepth.decompose import decompose_mct, defer_corrections


@functools.lru_cache(maxsize=None)
def deferred_mct(n: int):
    """Cached deferred decomposition (circuits are immutable by convention)."""
    return defer_corrections(decompose_mct(n))


@pytest.fixture
def mct_deferred():
    return deferred_mct
