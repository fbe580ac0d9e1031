"""JSON schemas for the machine-readable outputs."""

import json
from importlib import resources


def load(name: str) -> dict:
    """``load("trace")`` returns the parsed ``trace.schema.json``."""
    return json.loads(resources.files(__package__).joinpath(f"{name}.schema.json").read_text())
