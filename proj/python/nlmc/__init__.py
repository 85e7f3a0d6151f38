"""NLMC upscaling for 2D high-contrast elliptic problems.

Configs are plain dicts with the same layout as the CLI's JSON files.
"""

import json

import numpy as np

from . import _core
from ._core import (
    ClassificationError,
    InvalidArgument,
    ParseError,
    SolverError,
    UndefinedMetricError,
    auto_layers,
    poisson_series,
    relative_l2_error,
)

__all__ = [
    "ClassificationError",
    "InvalidArgument",
    "ParseError",
    "SolverError",
    "UndefinedMetricError",
    "auto_layers",
    "basis",
    "default_config",
    "medium",
    "normalize_config",
    "poisson_series",
    "relative_l2_error",
    "solve",
    "sweep",
    "validate",
]


def _dump(config):
    return json.dumps(config if config is not None else {})


def default_config():
    return json.loads(_core.default_config())


def normalize_config(config):
    """Validated config with every default filled in."""
    return json.loads(_core.normalize_config(_dump(config)))


def solve(config=None, layers=None):
    """Fine reference plus NLMC solve. Returns report, fields and coarse values."""
    out = _core.solve(_dump(config), layers)
    out["report"] = json.loads(out["report"])
    return out


def sweep(config, axis, values):
    return _core.sweep(_dump(config), axis, [float(v) for v in values])


def basis(config, block, region=0, layers=None):
    return _core.basis(_dump(config), block, region, layers)


def medium(config=None):
    return np.asarray(_core.medium(_dump(config)))


def validate(perturbation=0.0):
    return _core.validate(perturbation)
