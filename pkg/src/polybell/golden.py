"""Reference values used by the CLI --check mode, loaded from bundled data."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def golden_table() -> dict:
    with resources.files(__package__).joinpath("golden.json").open("r") as fh:
        return json.load(fh)


class CheckFailure(Exception):
    """A computed value disagrees with the reference table."""


def expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailure(message)


def expect_close(value: float, reference: float, tol: float, message: str) -> None:
    if not abs(value - reference) <= tol:
        raise CheckFailure(f"{message}: got {value!r}, expected {reference!r} (tol {tol})")
