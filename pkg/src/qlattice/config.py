"""JSON configuration and scenario files.

The file schema mirrors the core parameter types one-to-one; unknown keys
are rejected everywhere so typos fail loudly. `sim.dt` may be null, in
which case the stability heuristic picks the step size.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import QLatticeError
from .evolve import choose_dt
from .grid import Cell, GridSpec
from .initial import GaussianSpec
from .model import DisplayChannel, ModelParams, ParticleSpec, PotentialMode, SimConfig
from .session import EventAction, ScenarioEvent, Session


class ConfigError(QLatticeError):
    """Invalid configuration file or payload."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(_Strict):
    m: int = Field(default=8, ge=2)
    n: int = Field(default=8, ge=2)
    dx: float = Field(default=1.0, gt=0)
    dy: float = Field(default=1.0, gt=0)


class ParticleConfig(_Strict):
    mass: float = Field(gt=0)
    spring_k: float = Field(default=0.0, ge=0)
    display_channel: DisplayChannel = DisplayChannel.NONE


class ModelConfig(_Strict):
    hbar: float = Field(default=1.0, gt=0)
    potential_mode: PotentialMode = PotentialMode.RAW
    particles: list[ParticleConfig] = Field(
        default_factory=lambda: [
            ParticleConfig(mass=1.0, spring_k=0.1, display_channel=DisplayChannel.RED),
            ParticleConfig(mass=1.0, spring_k=0.1, display_channel=DisplayChannel.GREEN),
            ParticleConfig(mass=1.0, spring_k=0.1, display_channel=DisplayChannel.BLUE),
        ],
        min_length=1,
    )


class SimFileConfig(_Strict):
    dt: float | None = Field(default=None, gt=0)
    dt_safety: float = Field(default=0.1, gt=0, le=1)
    steps_per_frame: int = Field(default=20, ge=1)
    seed: int = Field(default=1234, ge=0)


class GaussianConfig(_Strict):
    center: tuple[float, float]
    width: float = Field(gt=0)
    momentum: tuple[float, float] = (0.0, 0.0)


def _default_initial() -> list[GaussianConfig]:
    return [GaussianConfig(center=(2.0, 2.0), width=0.9) for _ in range(3)]


class FileConfig(_Strict):
    """Top-level configuration; defaults give the playable 3-particle demo."""

    grid: GridConfig = Field(default_factory=GridConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    sim: SimFileConfig = Field(default_factory=SimFileConfig)
    initial_state: list[GaussianConfig] = Field(default_factory=_default_initial)

    @model_validator(mode="after")
    def _counts_match(self) -> "FileConfig":
        if len(self.initial_state) != len(self.model.particles):
            raise ValueError(
                f"initial_state has {len(self.initial_state)} packets for "
                f"{len(self.model.particles)} particles"
            )
        if len(self.model.particles) >= 2 and not any(
            p.spring_k > 0 for p in self.model.particles
        ):
            raise ValueError("model.particles: total spring constant must be > 0")
        return self


def parse_config(payload: dict) -> FileConfig:
    try:
        return FileConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config_file(path: str | Path) -> FileConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(payload)


def to_core(
    cfg: FileConfig,
) -> tuple[ModelParams, GridSpec, SimConfig, tuple[GaussianSpec, ...]]:
    """Translate a validated file config into core parameter objects."""
    grid = GridSpec(m=cfg.grid.m, n=cfg.grid.n, dx=cfg.grid.dx, dy=cfg.grid.dy)
    model = ModelParams(
        hbar=cfg.model.hbar,
        potential_mode=cfg.model.potential_mode,
        particles=tuple(
            ParticleSpec(
                mass=p.mass, spring_k=p.spring_k, display_channel=p.display_channel
            )
            for p in cfg.model.particles
        ),
    )
    dt = cfg.sim.dt if cfg.sim.dt is not None else choose_dt(grid, model, cfg.sim.dt_safety)
    sim = SimConfig(
        dt=dt,
        dt_safety=cfg.sim.dt_safety,
        steps_per_frame=cfg.sim.steps_per_frame,
        seed=cfg.sim.seed,
    )
    initial = tuple(
        GaussianSpec(center=g.center, width=g.width, momentum=g.momentum)
        for g in cfg.initial_state
    )
    return model, grid, sim, initial


def session_from_config(cfg: FileConfig, *, seed: int | None = None) -> Session:
    """Build a fresh session; `seed` overrides the configured one."""
    model, grid, sim, initial = to_core(cfg)
    if seed is not None:
        sim = SimConfig(
            dt=sim.dt,
            dt_safety=sim.dt_safety,
            steps_per_frame=sim.steps_per_frame,
            seed=seed,
        )
    return Session(model, grid, sim, initial)


class ScenarioEventConfig(_Strict):
    frame: int = Field(ge=0)
    action: EventAction
    ax: int | None = None
    ay: int | None = None

    @model_validator(mode="after")
    def _click_has_cell(self) -> "ScenarioEventConfig":
        if self.action is EventAction.CLICK and (self.ax is None or self.ay is None):
            raise ValueError("click event requires ax and ay")
        return self


def parse_scenario(payload: list) -> list[ScenarioEvent]:
    if not isinstance(payload, list):
        raise ConfigError("scenario file must be a JSON array of events")
    events = []
    for i, entry in enumerate(payload):
        try:
            ev = ScenarioEventConfig.model_validate(entry)
        except ValidationError as exc:
            raise ConfigError(f"scenario event {i}: {exc}") from exc
        cell = Cell(ev.ax, ev.ay) if ev.action is EventAction.CLICK else None
        events.append(ScenarioEvent(frame=ev.frame, action=ev.action, cell=cell))
    return events


def load_scenario_file(path: str | Path) -> list[ScenarioEvent]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc
    return parse_scenario(payload)
