"""Bundled scenario files, addressable by name (e.g. "cluttered")."""

from __future__ import annotations

from importlib import resources

from ..world import Scenario, parse_scenario

BUNDLED = ("straight", "corridor", "cluttered", "tiny")


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario named {name!r} (choices: {', '.join(BUNDLED)})")
    return resources.files(__package__).joinpath(f"{name}.scn").read_text(encoding="utf-8")


def load_bundled(name: str) -> Scenario:
    return parse_scenario(bundled_text(name), name=name)
