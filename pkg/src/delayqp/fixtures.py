"""Bundled example problems and their parameter files."""

from importlib import resources
from pathlib import Path

from delayqp.config import load_params
from delayqp.problem import load_problem

NAMES = ("example1", "example1_prose_B", "example2")


def fixture_path(name):
    """Path of a bundled JSON file, e.g. ``fixture_path("example1")``."""
    fname = name if name.endswith(".json") else f"{name}.json"
    path = Path(str(resources.files("delayqp") / "data" / fname))
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture {fname!r}")
    return path


def load_example(name):
    return load_problem(fixture_path(name))


def load_example_params(name):
    """Parameters tuned for ``name``; the prose-B variant shares example1's."""
    base = "example1" if name.startswith("example1") else name
    return load_params(fixture_path(f"{base}_params"))
