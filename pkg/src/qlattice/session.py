"""Deterministic simulation sessions.

A session owns one wavefunction plus its configuration, advances it frame
by frame (steps_per_frame explicit steps each), applies clicks, and emits
per-frame diagnostics. Everything observable is a pure function of
(configs, seed, event sequence): the only randomness is the session's own
PCG64 stream, which is consumed exclusively by click sampling.

Elapsed time is derived from an integer step counter, never accumulated in
floating point, so t == frame_no * steps_per_frame * dt holds exactly for
an undisturbed run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import QLatticeError, UnstableStepError
from .evolve import choose_dt, step
from .grid import Cell, GridSpec
from .hamiltonian import kinetic_energy, potential_energy
from .initial import GaussianSpec, gaussian_product_state
from .measure import MeasurementOutcome, collapse, sample_detection
from .model import ModelParams, SimConfig
from .state import Marginal2D, WaveFunction, all_marginals, expected_position


class SessionStatus(str, Enum):
    RUNNING = "running"
    PAUSED = "paused"


class EventAction(str, Enum):
    CLICK = "click"
    PAUSE = "pause"
    RESUME = "resume"
    RESET = "reset"


@dataclass(frozen=True)
class ScenarioEvent:
    """One scripted action, applied at the boundary after `frame` frames."""

    frame: int
    action: EventAction
    cell: Cell | None = None

    def __post_init__(self):
        if self.frame < 0:
            raise QLatticeError("event frame must be >= 0")
        if self.action is EventAction.CLICK and self.cell is None:
            raise QLatticeError("click event requires a cell")


@dataclass
class FrameStats:
    """Diagnostics captured at a frame boundary."""

    frame: int
    t: float
    pre_norm: float
    total_energy: float
    kinetic: list[float]
    expected_pos: list[tuple[float, float]]
    cm: tuple[float, float]


@dataclass
class FrameRecord:
    """One entry of a scenario trajectory."""

    frame: int
    stats: FrameStats
    marginals: list[Marginal2D]
    outcomes: list[MeasurementOutcome] = field(default_factory=list)


class Session:
    """Owns the evolving state; all mutation goes through its methods."""

    def __init__(
        self,
        model: ModelParams,
        grid: GridSpec,
        sim: SimConfig,
        initial: tuple[GaussianSpec, ...],
    ):
        if len(initial) != model.n_particles:
            raise QLatticeError(
                f"initial_state: got {len(initial)} packets for "
                f"{model.n_particles} particles"
            )
        self.model = model
        self.grid = grid
        self.sim = sim
        self.initial = tuple(initial)
        self.psi: WaveFunction = gaussian_product_state(grid, model, initial)
        self.total_steps: int = 0
        self.frame_no: int = 0
        self.status = SessionStatus.RUNNING
        self.rng = np.random.Generator(np.random.PCG64(sim.seed))
        self._last_pre_norm: float = 1.0

    @classmethod
    def create(
        cls,
        model: ModelParams,
        grid: GridSpec,
        initial: tuple[GaussianSpec, ...],
        *,
        dt: float | None = None,
        dt_safety: float = 0.1,
        steps_per_frame: int = 1,
        seed: int = 0,
    ) -> "Session":
        """Build a session, defaulting dt to the stability heuristic."""
        if dt is None:
            dt = choose_dt(grid, model, dt_safety)
        sim = SimConfig(
            dt=dt, dt_safety=dt_safety, steps_per_frame=steps_per_frame, seed=seed
        )
        return cls(model, grid, sim, initial)

    @property
    def t(self) -> float:
        return self.total_steps * self.sim.dt

    def frame_stats(self) -> FrameStats:
        """Diagnostics of the current state (no evolution)."""
        kin = [
            kinetic_energy(self.psi, k, self.model)
            for k in range(self.model.n_particles)
        ]
        pos = [
            expected_position(self.psi, k) for k in range(self.model.n_particles)
        ]
        return FrameStats(
            frame=self.frame_no,
            t=self.t,
            pre_norm=self._last_pre_norm,
            total_energy=sum(kin) + potential_energy(self.psi, self.model),
            kinetic=kin,
            expected_pos=pos,
            cm=self._expected_center(pos),
        )

    def _expected_center(self, pos: list[tuple[float, float]]) -> tuple[float, float]:
        total = self.model.total_spring()
        if total <= 0:
            # Single free particle: the force center degenerates to it.
            return pos[0]
        ks = [p.spring_k for p in self.model.particles]
        x = sum(k * p[0] for k, p in zip(ks, pos)) / total
        y = sum(k * p[1] for k, p in zip(ks, pos)) / total
        return (x, y)

    def advance_frame(self) -> tuple[FrameStats, list[Marginal2D]]:
        """Run steps_per_frame explicit steps and emit diagnostics.

        On a blown-up step the session pauses itself and re-raises, leaving
        the last finite state in place.
        """
        if self.status is not SessionStatus.RUNNING:
            raise QLatticeError("not running")
        for _ in range(self.sim.steps_per_frame):
            try:
                self.psi, self._last_pre_norm = step(self.psi, self.model, self.sim.dt)
            except UnstableStepError:
                self.status = SessionStatus.PAUSED
                raise
            self.total_steps += 1
        self.frame_no += 1
        return self.frame_stats(), all_marginals(self.psi)

    def handle_click(self, cell: Cell) -> MeasurementOutcome:
        """Probe a cell; collapse on detection, leave psi untouched on none."""
        if not self.grid.contains(cell.ax, cell.ay):
            raise QLatticeError(f"cell outside grid: ({cell.ax}, {cell.ay})")
        outcome = sample_detection(self.psi, cell, self.rng)
        if outcome.detected is not None:
            self.psi = collapse(self.psi, outcome.detected, cell)
        return outcome

    def pause(self) -> None:
        self.status = SessionStatus.PAUSED

    def resume(self) -> None:
        self.status = SessionStatus.RUNNING

    def reset(self) -> None:
        """Return to the initial state, including the RNG stream."""
        self.psi = gaussian_product_state(self.grid, self.model, self.initial)
        self.total_steps = 0
        self.frame_no = 0
        self.status = SessionStatus.RUNNING
        self.rng = np.random.Generator(np.random.PCG64(self.sim.seed))
        self._last_pre_norm = 1.0

    def set_steps_per_frame(self, steps_per_frame: int) -> None:
        if steps_per_frame < 1:
            raise QLatticeError("steps_per_frame must be >= 1")
        self.sim = SimConfig(
            dt=self.sim.dt,
            dt_safety=self.sim.dt_safety,
            steps_per_frame=steps_per_frame,
            seed=self.sim.seed,
        )
        # t bookkeeping stays step-based, so a speed change never rewrites time.


def run_scenario(
    session: Session, events: list[ScenarioEvent], frames: int
) -> list[FrameRecord]:
    """Advance `frames` frames, firing scripted events at frame boundaries.

    An event with frame == f is applied right after the f-th frame is
    computed (frame 0 events fire before any evolution; their outcomes land
    on the first record). Ties are applied in listed order. Click outcomes
    attach to the record of the frame they follow.
    """
    by_frame: dict[int, list[ScenarioEvent]] = {}
    for ev in sorted(events, key=lambda e: e.frame):
        if ev.frame > frames:
            raise QLatticeError(
                f"event at frame {ev.frame} beyond scenario length {frames}"
            )
        by_frame.setdefault(ev.frame, []).append(ev)

    records: list[FrameRecord] = []
    pending = [_apply_event(session, ev) for ev in by_frame.get(0, [])]
    pending = [o for o in pending if o is not None]
    for _ in range(frames):
        if session.status is SessionStatus.RUNNING:
            stats, marginals = session.advance_frame()
        else:
            stats, marginals = session.frame_stats(), all_marginals(session.psi)
        record = FrameRecord(
            frame=stats.frame, stats=stats, marginals=marginals, outcomes=pending
        )
        pending = []
        for ev in by_frame.get(len(records) + 1, []):
            outcome = _apply_event(session, ev)
            if outcome is not None:
                record.outcomes.append(outcome)
        records.append(record)
    return records


def _apply_event(session: Session, ev: ScenarioEvent) -> MeasurementOutcome | None:
    if ev.action is EventAction.CLICK:
        assert ev.cell is not None
        return session.handle_click(ev.cell)
    if ev.action is EventAction.PAUSE:
        session.pause()
    elif ev.action is EventAction.RESUME:
        session.resume()
    elif ev.action is EventAction.RESET:
        session.reset()
    return None
