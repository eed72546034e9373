"""Experiment configuration: typed dataclass plus flat file formats.

Config files are flat key/value sections ([model], [estimator], [verify],
optionally [mu]) whose values are JSON fragments; a whole-file JSON document
with the same section names is accepted as an alternative.  Parsing and
serialisation round-trip exactly.
"""
from __future__ import annotations

import configparser
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import ConfigError, Window
from .specfun import WaitingDistribution

MODEL_KINDS = ("poisson", "marked-poisson", "matern", "renewal", "beta", "ginibre")
STATS = ("paircorr", "diffraction")


def parse_grid_spec(spec: str):
    """Parse ``min:max:n`` (inclusive endpoints, n points) into an array."""
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise ConfigError(f"grid: expected 'min:max:n', got {spec!r}") from exc
    if n < 1 or hi < lo or (n > 1 and hi == lo):
        raise ConfigError(f"grid: bad range {spec!r}")
    return np.linspace(lo, hi, n)


def format_grid_spec(grid) -> str:
    g = np.asarray(grid, dtype=float)
    return f"{g[0]:g}:{g[-1]:g}:{len(g)}"


@dataclass
class ExperimentConfig:
    """Everything a verification run needs, validated on construction."""

    model: str
    stat: str
    grid: str  # "min:max:n"
    master_seed: int = 1
    replicas: int = 20
    tol_sup: float = 0.05
    z_cap: float = 4.0
    threads: int = 1
    exclude: tuple = ()  # extra exclusion intervals [(a, b), ...]
    # model parameters (used per kind)
    rho: float = 1.0
    dimension: int = 1
    window: str = "interval"
    size: float = 1.0e4
    hard_core: float = 0.1
    beta: int = 2
    n: int = 2048
    keep: float = 0.1
    mu: Optional[WaitingDistribution] = None
    # estimator knobs
    band_average: bool = True
    subtract_mean: Optional[bool] = None  # default: 2D yes, 1D no

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model: unknown kind {self.model!r}")
        if self.stat not in STATS:
            raise ConfigError(f"stat: must be one of {STATS}")
        if self.replicas < 1:
            raise ConfigError("replicas: must be >= 1")
        if self.tol_sup <= 0 or self.z_cap <= 0:
            raise ConfigError("tolerances: must be positive")
        if self.threads < 1:
            raise ConfigError("threads: must be >= 1")
        if self.model == "renewal" and self.mu is None:
            raise ConfigError("mu: renewal model needs a waiting distribution")
        if self.model == "beta" and self.beta not in (1, 2, 4):
            raise ConfigError("beta: must be 1, 2 or 4")
        for pair in self.exclude:
            if len(pair) != 2 or not pair[0] < pair[1]:
                raise ConfigError(f"exclude: bad interval {pair!r}")
        grid = parse_grid_spec(self.grid)
        if self.stat == "diffraction" and len(grid) > 1:
            spacing = grid[1] - grid[0]
            if grid[0] < spacing / 2:
                raise ConfigError("grid: diffraction grid must start >= spacing/2")

    # -- window geometry ----------------------------------------------------

    def observation_window(self) -> Window:
        from . import samplers

        if self.model == "beta":
            return Window.interval(samplers.beta_bulk_window_length(self.beta, self.n, self.keep))
        if self.model == "ginibre":
            return Window.disk(samplers.ginibre_window_radius(self.n, self.keep))
        if self.dimension == 1:
            if self.window != "interval":
                raise ConfigError("window: 1D models use 'interval'")
            return Window.interval(self.size)
        if self.window not in ("disk", "square"):
            raise ConfigError("window: 2D models use 'disk' or 'square'")
        return Window(self.window, self.size)

    # -- (de)serialisation ----------------------------------------------------

    def to_sections(self) -> dict:
        model = {"kind": self.model}
        if self.model in ("poisson", "marked-poisson", "matern"):
            model.update(rho=self.rho, dimension=self.dimension,
                         window=self.window, size=self.size)
            if self.model == "matern":
                model["hard_core"] = self.hard_core
        elif self.model == "renewal":
            model.update(size=self.size)
        elif self.model == "beta":
            model.update(beta=self.beta, n=self.n, keep=self.keep)
        elif self.model == "ginibre":
            model.update(n=self.n, keep=self.keep)
        estimator = {
            "stat": self.stat,
            "grid": self.grid,
            "band_average": self.band_average,
        }
        if self.subtract_mean is not None:
            estimator["subtract_mean"] = self.subtract_mean
        verify = {
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "tol_sup": self.tol_sup,
            "z_cap": self.z_cap,
            "threads": self.threads,
        }
        if self.exclude:
            verify["exclude"] = [list(p) for p in self.exclude]
        sections = {"model": model, "estimator": estimator, "verify": verify}
        if self.mu is not None:
            sections["mu"] = self.mu.to_fragment()
        return sections

    @staticmethod
    def from_sections(sections: dict) -> "ExperimentConfig":
        model = dict(sections.get("model", {}))
        estimator = dict(sections.get("estimator", {}))
        verify = dict(sections.get("verify", {}))
        kind = model.pop("kind", None)
        if kind is None:
            raise ConfigError("model.kind: missing")
        mu = None
        if "mu" in sections:
            try:
                mu = WaitingDistribution.from_fragment(sections["mu"])
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"mu: {exc}") from exc
        kwargs = {}
        for key in ("rho", "dimension", "window", "size", "hard_core", "beta", "n", "keep"):
            if key in model:
                kwargs[key] = model.pop(key)
        if model:
            raise ConfigError(f"model: unknown keys {sorted(model)}")
        for key in ("stat", "grid", "band_average", "subtract_mean"):
            if key in estimator:
                kwargs[key] = estimator.pop(key)
        if estimator:
            raise ConfigError(f"estimator: unknown keys {sorted(estimator)}")
        for key in ("replicas", "master_seed", "tol_sup", "z_cap", "threads"):
            if key in verify:
                kwargs[key] = verify.pop(key)
        if "exclude" in verify:
            kwargs["exclude"] = tuple(tuple(p) for p in verify.pop("exclude"))
        if verify:
            raise ConfigError(f"verify: unknown keys {sorted(verify)}")
        if "stat" not in kwargs or "grid" not in kwargs:
            raise ConfigError("estimator.stat and estimator.grid are required")
        return ExperimentConfig(model=kind, mu=mu, **kwargs)


def dumps_config(cfg: ExperimentConfig) -> str:
    """Serialise to the sectioned key/value text format (JSON values)."""
    lines = []
    for name, section in cfg.to_sections().items():
        lines.append(f"[{name}]")
        for key, value in section.items():
            lines.append(f"{key} = {json.dumps(value)}")
        lines.append("")
    return "\n".join(lines)


def loads_config(text: str) -> ExperimentConfig:
    """Parse either the sectioned key/value format or its JSON alternative."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            sections = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"json config: {exc}") from exc
        return ExperimentConfig.from_sections(sections)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from exc
    sections = {}
    for name in parser.sections():
        sec = {}
        for key, raw in parser.items(name):
            try:
                sec[key] = json.loads(raw)
            except json.JSONDecodeError:
                sec[key] = raw  # bare string value
        sections[name] = sec
    return ExperimentConfig.from_sections(sections)


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return loads_config(fh.read())
