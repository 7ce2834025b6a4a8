"""JSON wire protocol spoken over the streaming WebSocket.

Every message is one complete JSON object with a `type` discriminator.
Client to server: init, click, pause, resume, reset, set_speed.
Server to client: ready, frame, measurement, error. Marginals travel as
plain float arrays in row-major (ay outer, ax inner) order, matching the
CSV export layout.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from .errors import QLatticeError
from .grid import GridSpec
from .measure import MeasurementOutcome
from .model import DisplayChannel, ModelParams
from .session import FrameStats
from .state import Marginal2D


class WireError(QLatticeError):
    """Malformed or unexpected wire traffic."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class _Msg(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ------------------------------------------------------- client -> server


class InitMessage(_Msg):
    type: Literal["init"] = "init"
    config: dict = Field(default_factory=dict)


class ClickMessage(_Msg):
    type: Literal["click"] = "click"
    ax: int
    ay: int


class PauseMessage(_Msg):
    type: Literal["pause"] = "pause"


class ResumeMessage(_Msg):
    type: Literal["resume"] = "resume"


class ResetMessage(_Msg):
    type: Literal["reset"] = "reset"


class SetSpeedMessage(_Msg):
    type: Literal["set_speed"] = "set_speed"
    steps_per_frame: int = Field(ge=1)


# ------------------------------------------------------- server -> client


class GridPayload(_Msg):
    m: int
    n: int
    dx: float
    dy: float


class ParticlePayload(_Msg):
    index: int
    mass: float
    spring_k: float
    display_channel: DisplayChannel


class ReadyMessage(_Msg):
    type: Literal["ready"] = "ready"
    grid: GridPayload
    particles: list[ParticlePayload]
    steps_per_frame: int
    dt: float


class StatsPayload(_Msg):
    frame: int
    pre_norm: float
    total_energy: float
    kinetic: list[float]
    expected_pos: list[tuple[float, float]]
    cm: tuple[float, float]


class FrameMessage(_Msg):
    type: Literal["frame"] = "frame"
    seq: int
    t: float
    stats: StatsPayload
    marginals: list[list[float]]


class CellPayload(_Msg):
    ax: int
    ay: int


class MeasurementMessage(_Msg):
    type: Literal["measurement"] = "measurement"
    cell: CellPayload
    probs: list[float]
    detected: int | None


class ErrorMessage(_Msg):
    type: Literal["error"] = "error"
    code: str
    message: str


WireMessage = Annotated[
    Union[
        InitMessage,
        ClickMessage,
        PauseMessage,
        ResumeMessage,
        ResetMessage,
        SetSpeedMessage,
        ReadyMessage,
        FrameMessage,
        MeasurementMessage,
        ErrorMessage,
    ],
    Field(discriminator="type"),
]

_adapter: TypeAdapter = TypeAdapter(WireMessage)


def decode_message(text: str | bytes):
    """Parse one wire message; unknown types and bad payloads raise WireError."""
    try:
        return _adapter.validate_json(text)
    except ValidationError as exc:
        raise WireError("bad_message", f"invalid wire message: {exc.error_count()} errors") from exc


def encode_message(message) -> str:
    return message.model_dump_json()


def encode_ready(grid: GridSpec, model: ModelParams, steps_per_frame: int, dt: float) -> ReadyMessage:
    return ReadyMessage(
        grid=GridPayload(m=grid.m, n=grid.n, dx=grid.dx, dy=grid.dy),
        particles=[
            ParticlePayload(
                index=k,
                mass=p.mass,
                spring_k=p.spring_k,
                display_channel=p.display_channel,
            )
            for k, p in enumerate(model.particles)
        ],
        steps_per_frame=steps_per_frame,
        dt=dt,
    )


def encode_frame(stats: FrameStats, marginals: list[Marginal2D], seq: int | None = None) -> FrameMessage:
    """Frame payload: diagnostics plus one flat probability array per particle."""
    grid = marginals[0].grid if marginals else None
    if any(m.grid != grid for m in marginals):
        raise QLatticeError("marginals in one frame must share a grid")
    values = [m.row_major().tolist() for m in marginals]
    numbers = [stats.t, stats.pre_norm, stats.total_energy, *stats.kinetic]
    if not all(math.isfinite(v) for v in numbers):
        raise QLatticeError("frame stats contain non-finite values")
    return FrameMessage(
        seq=stats.frame if seq is None else seq,
        t=stats.t,
        stats=StatsPayload(
            frame=stats.frame,
            pre_norm=stats.pre_norm,
            total_energy=stats.total_energy,
            kinetic=list(stats.kinetic),
            expected_pos=[tuple(p) for p in stats.expected_pos],
            cm=tuple(stats.cm),
        ),
        marginals=values,
    )


def encode_measurement(outcome: MeasurementOutcome) -> MeasurementMessage:
    return MeasurementMessage(
        cell=CellPayload(ax=outcome.cell.ax, ay=outcome.cell.ay),
        probs=list(outcome.probs),
        detected=outcome.detected,
    )
