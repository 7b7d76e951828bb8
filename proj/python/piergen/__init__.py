"""Bridge-pier drawing generator: sampling, exports and rewards."""

import json

from . import _core
from ._core import PiergenError, r_p1, r_p2

__all__ = [
    "PiergenError",
    "curriculum",
    "default_design_space",
    "dxf",
    "generate",
    "png",
    "r_p1",
    "r_p2",
    "r_p3",
    "sample",
    "step",
    "violations",
]


def default_design_space() -> dict:
    return json.loads(_core.default_design_space())


def sample(seed: int, index: int, design_space: dict | None = None) -> dict:
    """Parameter values of one sample, keyed by name."""
    space = json.dumps(design_space) if design_space is not None else ""
    return json.loads(_core.sample(seed, index, space))


def violations(values: dict) -> list[str]:
    return _core.violations(json.dumps(values))


def dxf(values: dict, view: str) -> str:
    return _core.dxf(json.dumps(values), view)


def png(values: dict, view: str, width: int = 1600, height: int = 1200, stroke: int = 2) -> bytes:
    return _core.png(json.dumps(values), view, width, height, stroke)


def step(values: dict) -> str:
    return _core.step(json.dumps(values))


def r_p3(predictions: dict, values: dict, accuracy: dict) -> float:
    """Tier-weighted reward; tiers come from per-parameter accuracy."""
    return _core.r_p3({k: str(v) for k, v in predictions.items()}, json.dumps(values), accuracy)


def generate(config: dict, out: str, jobs: int = 1) -> int:
    return _core.generate(json.dumps(config), str(out), jobs)


def curriculum(config: dict, out: str) -> list[str]:
    return _core.curriculum(json.dumps(config), str(out))
