"""Scenario configuration: declarative parameter set for one simulation scenario.

The defaults correspond to the standard desk-scale setup: 19 hexagonal
cells, 3 MHz system bandwidth split into 15 PRBs, 43 dBm BS power budget,
100 users per cell, 5 dB antenna gain, -174 dBm/Hz noise density.
Configs are loaded from a YAML file of flat key: value pairs and may be
overridden per key from the command line.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import yaml

DEPLOYMENTS = ("sa", "nsa")
ALGORITHMS = ("ap_comp", "common_comp", "no_comp")
FILE_SIZE_CONVENTIONS = ("binary", "decimal")

# hex layouts grow in full rings: 1 + 3k(k+1) cells for k rings
_RING_CELL_COUNTS = {1: 0, 7: 1, 19: 2, 37: 3, 61: 4}


class ConfigurationError(ValueError):
    """Raised when a scenario parameter is missing, malformed, or out of range."""


@dataclass
class ScenarioConfig:
    # layout
    deployment: str = "sa"
    n_cells: int = 19
    cell_radius_m: float = 50.0
    users_per_cell: int = 100
    small_bs_per_cell: int = 6
    macro_small_distance_m: float = 50.0

    # link budget
    bandwidth_hz: float = 3e6
    n_prb: int = 15
    max_power_dbm: float = 43.0
    antenna_gain_db: float = 5.0
    noise_psd_dbm_hz: float = -174.0

    # scheduling
    algorithm: str = "ap_comp"
    cluster_size: int = 3  # common_comp only
    edge_margin_db: float = 6.0
    edge_users_per_cell: int = 10
    damping: float = 0.5
    ap_max_iterations: int = 200
    ap_stability_window: int = 10

    # power control
    rho0_dbm: float = -40.0
    p0_dbm: float = -110.0

    # traffic
    file_size_mb: float = 100.0
    file_size_convention: str = "binary"  # 1 MB = 2**20 bytes; "decimal" = 1e6
    background_load: bool = True  # idle BSs carry interior traffic on all PRBs (reuse 1)

    # experiment
    n_drops: int = 20
    seed: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.deployment not in DEPLOYMENTS:
            raise ConfigurationError(
                f"deployment must be one of {DEPLOYMENTS}, got {self.deployment!r}"
            )
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(
                f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}"
            )
        if self.n_cells not in _RING_CELL_COUNTS:
            raise ConfigurationError(
                f"n_cells must be a full hex-ring count {sorted(_RING_CELL_COUNTS)}, "
                f"got {self.n_cells}"
            )
        if not 50.0 <= self.cell_radius_m <= 500.0:
            raise ConfigurationError(
                f"cell_radius_m must lie in [50, 500], got {self.cell_radius_m}"
            )
        if self.users_per_cell < 1:
            raise ConfigurationError(
                f"users_per_cell must be >= 1, got {self.users_per_cell}"
            )
        if self.small_bs_per_cell < 1:
            raise ConfigurationError(
                f"small_bs_per_cell must be >= 1, got {self.small_bs_per_cell}"
            )
        if self.macro_small_distance_m <= 0:
            raise ConfigurationError(
                f"macro_small_distance_m must be > 0, got {self.macro_small_distance_m}"
            )
        if self.bandwidth_hz <= 0:
            raise ConfigurationError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if self.n_prb < 1:
            raise ConfigurationError(f"n_prb must be >= 1, got {self.n_prb}")
        if not 0.0 <= self.damping < 1.0:
            raise ConfigurationError(f"damping must lie in [0, 1), got {self.damping}")
        if self.edge_margin_db <= 0:
            raise ConfigurationError(
                f"edge_margin_db must be > 0, got {self.edge_margin_db}"
            )
        if self.edge_users_per_cell < 1:
            raise ConfigurationError(
                f"edge_users_per_cell must be >= 1, got {self.edge_users_per_cell}"
            )
        if self.cluster_size < 1:
            raise ConfigurationError(f"cluster_size must be >= 1, got {self.cluster_size}")
        if self.file_size_convention not in FILE_SIZE_CONVENTIONS:
            raise ConfigurationError(
                f"file_size_convention must be one of {FILE_SIZE_CONVENTIONS}, "
                f"got {self.file_size_convention!r}"
            )
        if self.file_size_mb <= 0:
            raise ConfigurationError(f"file_size_mb must be > 0, got {self.file_size_mb}")
        if self.n_drops < 1:
            raise ConfigurationError(f"n_drops must be >= 1, got {self.n_drops}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be a nonnegative integer, got {self.seed}")

    @property
    def n_rings(self) -> int:
        return _RING_CELL_COUNTS[self.n_cells]

    @property
    def max_power_w(self) -> float:
        return float(dbm_to_watts(self.max_power_dbm))

    @property
    def rho0_w(self) -> float:
        return float(dbm_to_watts(self.rho0_dbm))

    @property
    def p0_w(self) -> float:
        return float(dbm_to_watts(self.p0_dbm))

    @property
    def file_size_bits(self) -> float:
        bytes_per_mb = 2**20 if self.file_size_convention == "binary" else 10**6
        return self.file_size_mb * bytes_per_mb * 8

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.as_dict(), indent=2) + "\n")

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        raw = yaml.safe_load(Path(path).read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config file {path} must be a flat key: value mapping")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(known[key], value)
        return cls(**kwargs)

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        """Apply string-valued key=value overrides (CLI --set) on top of self."""
        known = {f.name: f for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            changes[key] = _coerce(known[key], value)
        return self.replace(**changes)


def _coerce(field, value):
    """Coerce a parsed-YAML or CLI string value to the field's declared type."""
    # field.type is the annotation string ("int", "float", "str")
    name = field.type if isinstance(field.type, str) else field.type.__name__
    try:
        if name == "str":
            return str(value).strip().lower()
        if name == "bool":
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("true", "1", "yes", "on"):
                return True
            if text in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        if name == "int":
            return int(str(value).strip())
        if name == "float":
            return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{field.name} expects {name}, got {value!r}") from exc
    return value


def dbm_to_watts(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) / 1000.0


def watts_to_dbm(watts):
    return 10.0 * np.log10(np.asarray(watts, dtype=float) * 1000.0)
