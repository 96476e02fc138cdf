"""Bundled taxonomy and template seed data."""

from __future__ import annotations

import json
from importlib import resources

from ..gymspec import GymSpec, parse_document


def _load(name: str):
    path = resources.files("autodo.catalog").joinpath("data", name)
    return json.loads(path.read_text(encoding="utf-8"))


def taxonomy_rows(taxonomy: str) -> list[dict]:
    """Seed rows {code, title, parent_code} for 'do_type' or 'industry'."""
    if taxonomy == "do_type":
        return _load("do_types.json")
    if taxonomy == "industry":
        return _load("naics.json")
    raise ValueError(f"unknown taxonomy {taxonomy!r}")


def template_rows() -> list[dict]:
    return _load("templates.json")


def seed_spec(template_id: str) -> GymSpec:
    """Parse one bundled template's gym document (gridworld, bakery, ...)."""
    for row in template_rows():
        if row["id"] == template_id:
            return parse_document(row["spec"])
    raise KeyError(f"no seed template {template_id!r}")
