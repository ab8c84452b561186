"""Experiment configuration for the verification harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from dataclasses import fields as dataclass_fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from pdmesh.errors import ExperimentError
from pdmesh.interp.fields import AnalyticField, make_field, random_polynomial
from pdmesh.utils.config_loader import CONFIG_DIR, load_config, validate_config
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "SCHEMA_NAME",
    "DEFAULT_CONFIG",
    "SMOKE_CONFIG",
    "ExperimentConfig",
    "build_field",
    "derive_seed",
    "load_experiment",
]

_LOGGER = get_logger("Experiment")

SCHEMA_NAME = "experiment_config_schema"
DEFAULT_CONFIG = CONFIG_DIR / "verify_default.yaml"
SMOKE_CONFIG = CONFIG_DIR / "verify_smoke.yaml"

_DEFAULT_FIELDS: Tuple[Dict[str, Any], ...] = (
    {"name": "random-polynomial", "params": {"degree": 3}},
    {"name": "trig-product", "params": {"frequency": 1.0}},
    {"name": "sine-cosine", "params": {}},
)


def _real(value: Any) -> float:
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in {"inf", "infinity"}:
            return math.inf
        raise ExperimentError(f"expected a number or 'inf', got {value!r}")
    return float(value)


def derive_seed(base: int, *keys: int) -> int:
    """Independent 32-bit seed for the sub-experiment addressed by *keys*."""

    return int(np.random.SeedSequence([int(base), *(int(k) for k in keys)]).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    dims: Tuple[int, ...] = (2, 3)
    family: str = "random-delaunay"
    mesh_size: int = 12
    instances: int = 20
    levels: Tuple[int, ...] = (4, 8, 16)
    fields: Tuple[Mapping[str, Any], ...] = _DEFAULT_FIELDS
    rho: Tuple[float, ...] = (1.5, 2.0, 4.0, math.inf)
    lam: Tuple[float, ...] = (1.0, 2.0, math.inf)
    degrees: Tuple[int, ...] = (1, 2)
    safety_factor: float = 2.0
    c_int: Optional[float] = None
    fem_cases: Tuple[str, ...] = ("sine-product",)
    fem_dims: Tuple[int, ...] = (2,)
    fem_levels: Tuple[int, ...] = (4, 8, 16)
    allow_high_dim_fem: bool = False
    coxeter_dims: Tuple[int, ...] = (2, 3)
    coxeter_side: float = 3.0
    sliver_thickness: Tuple[float, ...] = (1e-3,)
    optimality: Mapping[str, int] = field(default_factory=lambda: {"sets": 10, "points": 20, "alternatives": 20})
    convergence: bool = True

    def __post_init__(self) -> None:
        if any(d < 2 or d > 5 for d in self.dims):
            raise ExperimentError(f"dimensions must lie in 2..5, got {list(self.dims)}")
        if self.instances < 2:
            raise ExperimentError("at least two instances are needed for a calibration/held-out split")
        if not self.safety_factor >= 1.0:
            raise ExperimentError(f"safety factor must be >= 1, got {self.safety_factor}")
        if self.c_int is not None and not self.c_int > 0.0:
            raise ExperimentError(f"c_int must be positive, got {self.c_int}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Validate *data* against the experiment schema and fill defaults."""

        document = validate_config(data, SCHEMA_NAME)
        kwargs: Dict[str, Any] = {}
        for name in ("seed", "family", "mesh_size", "instances", "allow_high_dim_fem", "convergence"):
            if name in document:
                kwargs[name] = document[name]
        for name in ("dims", "levels", "degrees", "fem_dims", "fem_levels", "coxeter_dims"):
            if name in document:
                kwargs[name] = tuple(int(v) for v in document[name])
        for name in ("rho", "lam", "sliver_thickness"):
            if name in document:
                kwargs[name] = tuple(_real(v) for v in document[name])
        if "fields" in document:
            kwargs["fields"] = tuple(
                {"name": str(spec["name"]), "params": dict(spec.get("params", {}))} for spec in document["fields"]
            )
        if "fem_cases" in document:
            kwargs["fem_cases"] = tuple(str(v) for v in document["fem_cases"])
        if "safety_factor" in document:
            kwargs["safety_factor"] = float(document["safety_factor"])
        if document.get("c_int") is not None:
            kwargs["c_int"] = float(document["c_int"])
        if "coxeter_side" in document:
            kwargs["coxeter_side"] = float(document["coxeter_side"])
        if "optimality" in document:
            merged = dict(cls().optimality)
            merged.update({key: int(value) for key, value in document["optimality"].items()})
            kwargs["optimality"] = merged
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_mapping(load_config(path))

    def with_seed(self, seed: int) -> "ExperimentConfig":
        values = {f.name: getattr(self, f.name) for f in dataclass_fields(self)}
        values["seed"] = int(seed)
        return ExperimentConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {}
        for f in dataclass_fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = [dict(v) if isinstance(v, Mapping) else v for v in value]
            elif isinstance(value, Mapping):
                value = dict(value)
            payload[f.name] = value
        return payload


def load_experiment(path: Optional[str | Path] = None, *, seed: Optional[int] = None) -> ExperimentConfig:
    """Load *path* (the packaged default when omitted), optionally overriding the seed."""

    config = ExperimentConfig.from_file(path if path is not None else DEFAULT_CONFIG)
    if seed is not None:
        config = config.with_seed(seed)
    _LOGGER.debug("Experiment config: %s", config.to_dict())
    return config


def build_field(spec: Mapping[str, Any], dim: int, seed: int = 0) -> AnalyticField:
    """Field described by a ``{"name", "params"}`` record; ``random-polynomial`` draws from *seed*."""

    name = str(spec["name"])
    params = dict(spec.get("params", {}))
    if name == "random-polynomial":
        return random_polynomial(dim, int(params.get("degree", 3)), seed=seed, scale=float(params.get("scale", 1.0)))
    return make_field(name, dim, **params)
