"""Experiment configuration: one INI-style text file, no other sources.

Sections and keys map one-to-one onto ExperimentConfig fields; anything the
file omits keeps its default, unknown keys are rejected.  The output
directory is the only setting with an environment override hook, and that
hook lives in the CLI (--out), not here.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "template_text"]


class ConfigError(Exception):
    """Bad configuration file or invalid parameter combination."""


_SCHEMA = {
    "grid": {"half_width": float, "npts": int},
    "potential": {"external": str, "interaction": str},
    "initial": {"center_x": float, "center_xi": float,
                "width_x": float, "width_xi": float},
    "run": {"label": str, "h_values": "floats", "t_end": float, "dt": float,
            "snapshot_every": float, "expansion_order": int, "seed": int,
            "out_dir": str},
}


@dataclass(frozen=True)
class ExperimentConfig:
    label: str = "default"
    half_width: float = 8.0
    npts: int = 256
    external: str = "gauss:0.5,0,1"
    interaction: str = "gauss:0.5,0,1"
    center_x: float = -1.0
    center_xi: float = 0.0
    width_x: float = 1.0
    width_xi: float = 0.75
    h_values: tuple = (0.4, 0.2, 0.1, 0.05)
    t_end: float = 1.0
    dt: float = 0.0025
    snapshot_every: float = 0.25
    expansion_order: int = 1
    seed: int = 7
    out_dir: str = "results"

    def __post_init__(self):
        if self.half_width <= 0 or self.npts <= 0 or self.npts % 2:
            raise ConfigError("grid needs positive half_width and even npts")
        if self.width_x <= 0 or self.width_xi <= 0:
            raise ConfigError("initial-data widths must be positive")
        if not self.h_values:
            raise ConfigError("h_values must not be empty")
        if any(h <= 0 or h > 1 for h in self.h_values):
            raise ConfigError("every h must lie in (0, 1]")
        if any(b <= a for a, b in zip(self.h_values[1:], self.h_values[:-1])):
            raise ConfigError("h_values must be strictly decreasing")
        if self.t_end <= 0 or self.dt <= 0 or self.snapshot_every <= 0:
            raise ConfigError("t_end, dt, snapshot_every must be positive")
        if not 0 <= self.expansion_order <= 3:
            raise ConfigError("expansion_order must be between 0 and 3")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    @property
    def snapshot_times(self) -> tuple:
        n = int(round(self.t_end / self.snapshot_every))
        if abs(n * self.snapshot_every - self.t_end) > 1e-9:
            raise ConfigError("snapshot_every must divide t_end")
        return tuple(i * self.snapshot_every for i in range(n + 1))


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            conv = _SCHEMA[section][key]
            try:
                if conv == "floats":
                    values[key] = tuple(float(v) for v in raw.split(","))
                else:
                    values[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
    assert set(values) <= known
    return ExperimentConfig(**values)


def template_text() -> str:
    cfg = ExperimentConfig()
    return f"""\
# experiment configuration; every key is optional and shown at its default
[grid]
half_width = {cfg.half_width:g}
npts = {cfg.npts}

[potential]
# term sums like "gauss:amp,center,width + cos:amp,harmonic,phase", or "none"
external = {cfg.external}
interaction = {cfg.interaction}

[initial]
center_x = {cfg.center_x:g}
center_xi = {cfg.center_xi:g}
width_x = {cfg.width_x:g}
width_xi = {cfg.width_xi:g}

[run]
label = {cfg.label}
h_values = {", ".join(f"{h:g}" for h in cfg.h_values)}
t_end = {cfg.t_end:g}
dt = {cfg.dt:g}
snapshot_every = {cfg.snapshot_every:g}
expansion_order = {cfg.expansion_order}
seed = {cfg.seed}
out_dir = {cfg.out_dir}
"""
