import pytest

from spacecurves.curve import validate_curve
from spacecurves.files import load_corpus
from spacecurves.scalars import BaseRing

FIBER_NAMES = [
    "line",
    "conic",
    "twisted-cubic",
    "skew-lines",
    "coplanar-lines",
    "ci-2-2",
    "quartic-from-skew-bilink",
    "skew-pair-alt",
]

ACM_NAMES = ["line", "conic", "twisted-cubic", "coplanar-lines", "ci-2-2"]
RAO_K_NAMES = ["skew-lines", "quartic-from-skew-bilink", "skew-pair-alt"]


@pytest.fixture(scope="session")
def K():
    return BaseRing(32003, False)


@pytest.fixture(scope="session")
def A():
    return BaseRing(32003, True)


@pytest.fixture(scope="session")
def corpus_curves():
    """Session-wide cache of validated corpus curves (invariants memoize)."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = validate_curve(load_corpus(name).to_ideal())
        return cache[name]

    return get
