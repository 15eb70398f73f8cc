"""Bundled example systems.

``laptop`` is a 13-part consumer laptop with a realistic disassembly
order (battery, disk and keyboard come out before the palm rest, the
display stack unbuilds from the bezel inward).  ``chain`` is two cog
wheels joined by a 12-link chain; lifting the whole chain off still
requires cutting one of its own links, which makes it the canonical
case of a removal set reaching inside the unit.
"""
from __future__ import annotations

import json
from importlib import resources

from .errors import UnknownFixture
from .instance import SystemInstance, load_instance

FIXTURE_NAMES = ("laptop", "chain")


def fixture(name: str) -> SystemInstance:
    """Return a bundled instance by name ('laptop' or 'chain')."""
    if name not in FIXTURE_NAMES:
        raise UnknownFixture(name)
    text = resources.files("lru_design.data").joinpath(f"{name}.json").read_text()
    return load_instance(json.loads(text))
