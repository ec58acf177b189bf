import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from openinc.sampling import DEFAULT_KINDS, random_structure  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

kinds = st.sampled_from(DEFAULT_KINDS)


@st.composite
def structures(draw, kind=None, max_size=9, open_only=None):
    """A random structure together with its build steps."""
    k = draw(kinds) if kind is None else kind
    seed = draw(st.integers(0, 2**32 - 1))
    size = draw(st.integers(0, max_size))
    oo = draw(st.booleans()) if open_only is None else open_only
    return random_structure(k, size, random.Random(seed), open_only=oo)


@st.composite
def subsets_of(draw, M):
    return frozenset(x for x in M.elements if draw(st.booleans()))


@pytest.fixture(scope="session")
def steiner():
    from openinc import builtin
    return builtin("steiner23-c6")
