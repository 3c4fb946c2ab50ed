"""Sweep configuration for the command-line tools."""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ._validation import InvalidParameterError, check_int, check_real
from .ensemble import SystemModel
from .receiver import DEFAULT_R_MAX, KINDS


@dataclass
class SweepConfig:
    M: int = 4
    N: int = 10
    strategies: list = field(default_factory=lambda: list(KINDS))
    grid_min: float = 0.2
    grid_max: float = 5.0
    grid_count: int = 20
    grid_spacing: str = "log"
    efficiency: float = 1.0
    visibility: float = 1.0
    dark_per_pulse: float = 0.0
    trials: int = None
    runs: int = 1
    output: str = "out"
    seed: int = 42
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        self.M = check_int(self.M, "M", minimum=2)
        self.N = check_int(self.N, "N", minimum=1)
        if not self.strategies:
            raise InvalidParameterError("strategies must not be empty")
        for kind in self.strategies:
            if kind not in KINDS:
                raise InvalidParameterError(f"unknown strategy {kind!r}")
        self.grid_min = check_real(self.grid_min, "grid.min", low=0.0)
        self.grid_max = check_real(self.grid_max, "grid.max", low=0.0)
        self.grid_count = check_int(self.grid_count, "grid.count", minimum=1)
        if self.grid_min > self.grid_max:
            raise InvalidParameterError("grid.min must not exceed grid.max")
        if self.grid_spacing not in ("log", "linear"):
            raise InvalidParameterError("grid.spacing must be 'log' or 'linear'")
        if self.grid_spacing == "log" and self.grid_min <= 0 and self.grid_count > 1:
            raise InvalidParameterError("log grid needs grid.min > 0")
        if self.trials is not None:
            self.trials = check_int(self.trials, "trials", minimum=1)
        self.runs = check_int(self.runs, "runs", minimum=1)
        self.seed = check_int(self.seed, "seed", minimum=0)
        self.r_max = check_real(self.r_max, "r_max", low=0.0)
        if self.r_max == 0:
            raise InvalidParameterError("r_max must be positive")
        self.model  # validates physical ranges

    @property
    def model(self):
        return SystemModel(self.efficiency, self.visibility, self.dark_per_pulse, self.N)

    @property
    def grid(self):
        if self.grid_count == 1:
            return np.array([self.grid_min])
        if self.grid_spacing == "log":
            return np.geomspace(self.grid_min, self.grid_max, self.grid_count)
        return np.linspace(self.grid_min, self.grid_max, self.grid_count)

    def to_record(self):
        record = asdict(self)
        grid = {k[5:]: record.pop(k) for k in ("grid_min", "grid_max", "grid_count", "grid_spacing")}
        record["grid"] = grid
        return record

    @classmethod
    def from_record(cls, record):
        record = dict(record)
        grid = record.pop("grid", {}) or {}
        if not isinstance(grid, dict):
            raise InvalidParameterError("grid must be a mapping with min/max/count/spacing")
        for key, value in grid.items():
            record[f"grid_{key}"] = value
        known = set(cls.__dataclass_fields__)
        unknown = set(record) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**record)


def load_config(path):
    """Read a YAML or JSON sweep configuration."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        record = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise InvalidParameterError(f"{path}: cannot parse config: {exc}") from None
    if not isinstance(record, dict):
        raise InvalidParameterError(f"{path}: config must be a mapping")
    return SweepConfig.from_record(record)
