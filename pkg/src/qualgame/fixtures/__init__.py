"""Example games shipped with the package."""

from importlib import resources

NAMES = ("matching_pennies", "fig2", "fig3", "fig4")


def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8")


def fixture_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")
