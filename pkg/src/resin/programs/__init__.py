"""Example Resin programs shipped with the package."""

from importlib import resources

NAMES = ("d", "safety", "drones")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.resin")


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
