import time
from dataclasses import dataclass

import pytest

from polybell.polygon import PolygonModel, build_model
from polybell.vertices import classify_entangled, enumerate_extreme_states


@dataclass
class EnumFixture:
    model: PolygonModel
    result: object
    classes: list
    seconds: float


def _run(n):
    model = build_model(n)
    start = time.perf_counter()
    result = enumerate_extreme_states(model)
    classes = classify_entangled(result.vertices, model)
    return EnumFixture(model=model, result=result, classes=classes,
                       seconds=time.perf_counter() - start)


@pytest.fixture(scope="session")
def model4():
    return build_model(4)


@pytest.fixture(scope="session")
def model5():
    return build_model(5)


@pytest.fixture(scope="session")
def model6():
    return build_model(6)


@pytest.fixture(scope="session")
def enum4_timed():
    return _run(4)


@pytest.fixture(scope="session")
def enum5_timed():
    return _run(5)


@pytest.fixture(scope="session")
def enum6_timed():
    return _run(6)


@pytest.fixture(scope="session")
def enum4(enum4_timed):
    return enum4_timed.result, enum4_timed.classes


@pytest.fixture(scope="session")
def enum5(enum5_timed):
    return enum5_timed.result, enum5_timed.classes


@pytest.fixture(scope="session")
def enum6(enum6_timed):
    return enum6_timed.result, enum6_timed.classes
