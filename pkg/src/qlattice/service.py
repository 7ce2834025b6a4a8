"""Streaming service: one simulation session per WebSocket connection.

The server paces frames at a fixed wall-clock rate and handles client
messages at frame boundaries, in arrival order. Outbound traffic goes
through a mailbox that keeps every control message (ready, measurement,
error) but holds only the newest unsent frame, so a slow client sees frame
gaps (visible as seq jumps) instead of unbounded buffering.
"""

from __future__ import annotations

import asyncio
from collections import deque
from pathlib import Path

from fastapi import FastAPI, WebSocket
from starlette.websockets import WebSocketDisconnect

from .config import ConfigError, FileConfig, parse_config, session_from_config
from .errors import QLatticeError, UnstableStepError
from .grid import Cell
from .session import Session, SessionStatus
from .state import all_marginals
from .wire import (
    ClickMessage,
    ErrorMessage,
    InitMessage,
    PauseMessage,
    ResetMessage,
    ResumeMessage,
    SetSpeedMessage,
    WireError,
    decode_message,
    encode_frame,
    encode_measurement,
    encode_message,
    encode_ready,
)


class Outbox:
    """Send queue with frame-drop semantics.

    Control messages are never dropped and always go out first; at most one
    frame is pending, newer frames overwrite an unsent older one.
    """

    def __init__(self):
        self._control: deque[str] = deque()
        self._frame: str | None = None
        self._wakeup = asyncio.Event()
        self.dropped_frames = 0

    def put_control(self, text: str) -> None:
        self._control.append(text)
        self._wakeup.set()

    def put_frame(self, text: str) -> None:
        if self._frame is not None:
            self.dropped_frames += 1
        self._frame = text
        self._wakeup.set()

    async def next(self) -> str:
        while True:
            if self._control:
                return self._control.popleft()
            if self._frame is not None:
                text, self._frame = self._frame, None
                return text
            self._wakeup.clear()
            await self._wakeup.wait()


class _Connection:
    def __init__(self, ws: WebSocket, default_config: FileConfig, fps: float):
        self.ws = ws
        self.default_config = default_config
        self.period = 1.0 / fps
        self.outbox = Outbox()
        self.inbox: asyncio.Queue[str] = asyncio.Queue()
        self.closed = asyncio.Event()
        self.session: Session | None = None
        self.seq = 0

    # -- lifecycle

    async def run(self) -> None:
        await self.ws.accept()
        if not await self._init_phase():
            return
        reader = asyncio.create_task(self._reader())
        sender = asyncio.create_task(self._sender())
        try:
            await self._tick_loop()
        finally:
            # Plain cancellation: the tasks hold no resources beyond the
            # socket, and awaiting them here can race connection teardown.
            reader.cancel()
            sender.cancel()

    async def _init_phase(self) -> bool:
        """Wait for a valid init message; reply ready plus a seq-0 frame."""
        while True:
            try:
                text = await self.ws.receive_text()
            except WebSocketDisconnect:
                return False
            try:
                msg = decode_message(text)
            except WireError as exc:
                await self._send_now(ErrorMessage(code=exc.code, message=str(exc)))
                continue
            if not isinstance(msg, InitMessage):
                await self._send_now(
                    ErrorMessage(code="bad_message", message="first message must be init")
                )
                continue
            try:
                cfg = parse_config(msg.config) if msg.config else self.default_config
                self.session = session_from_config(cfg)
            except (ConfigError, QLatticeError) as exc:
                await self._send_now(ErrorMessage(code="bad_config", message=str(exc)))
                continue
            s = self.session
            await self._send_now(
                encode_ready(s.grid, s.model, s.sim.steps_per_frame, s.sim.dt)
            )
            # Snapshot of the un-evolved state goes out before any paced
            # frame, so clients can paint immediately.
            try:
                await self.ws.send_text(self._frame_text())
            except (WebSocketDisconnect, RuntimeError):
                self.closed.set()
            return True

    async def _send_now(self, message) -> None:
        try:
            await self.ws.send_text(encode_message(message))
        except (WebSocketDisconnect, RuntimeError):
            self.closed.set()

    def _frame_text(self) -> str:
        assert self.session is not None
        stats = self.session.frame_stats()
        return encode_message(
            encode_frame(stats, all_marginals(self.session.psi), self.seq)
        )

    async def _reader(self) -> None:
        while True:
            try:
                text = await self.ws.receive_text()
            except (WebSocketDisconnect, RuntimeError):
                self.closed.set()
                return
            self.inbox.put_nowait(text)

    async def _sender(self) -> None:
        while True:
            text = await self.outbox.next()
            try:
                await self.ws.send_text(text)
            except (WebSocketDisconnect, RuntimeError):
                self.closed.set()
                return

    async def _tick_loop(self) -> None:
        loop = asyncio.get_running_loop()
        next_tick = loop.time() + self.period
        while not self.closed.is_set():
            while not self.inbox.empty():
                self._handle(self.inbox.get_nowait())
            self._advance()
            delay = next_tick - loop.time()
            if delay <= 0:
                next_tick = loop.time() + self.period
                delay = 0.0005
            else:
                next_tick += self.period
            try:
                await asyncio.wait_for(self.closed.wait(), timeout=delay)
            except asyncio.TimeoutError:
                pass

    # -- per-tick work

    def _advance(self) -> None:
        session = self.session
        assert session is not None
        if session.status is not SessionStatus.RUNNING:
            return
        try:
            session.advance_frame()
        except UnstableStepError as exc:
            # Session has paused itself; tell the client and keep serving.
            self.outbox.put_control(
                encode_message(ErrorMessage(code="unstable", message=str(exc)))
            )
            return
        self.seq += 1
        self.outbox.put_frame(self._frame_text())

    def _handle(self, text: str) -> None:
        session = self.session
        assert session is not None
        try:
            msg = decode_message(text)
        except WireError as exc:
            self.outbox.put_control(
                encode_message(ErrorMessage(code=exc.code, message=str(exc)))
            )
            return
        if isinstance(msg, ClickMessage):
            if not session.grid.contains(msg.ax, msg.ay):
                self.outbox.put_control(
                    encode_message(
                        ErrorMessage(
                            code="out_of_bounds",
                            message=f"cell outside grid: ({msg.ax}, {msg.ay})",
                        )
                    )
                )
                return
            outcome = session.handle_click(Cell(msg.ax, msg.ay))
            self.outbox.put_control(encode_message(encode_measurement(outcome)))
        elif isinstance(msg, PauseMessage):
            session.pause()
        elif isinstance(msg, ResumeMessage):
            session.resume()
        elif isinstance(msg, ResetMessage):
            session.reset()
            self.seq += 1
            self.outbox.put_frame(self._frame_text())
        elif isinstance(msg, SetSpeedMessage):
            try:
                session.set_steps_per_frame(msg.steps_per_frame)
            except QLatticeError as exc:
                self.outbox.put_control(
                    encode_message(ErrorMessage(code="bad_message", message=str(exc)))
                )
        elif isinstance(msg, InitMessage):
            self.outbox.put_control(
                encode_message(
                    ErrorMessage(code="bad_message", message="session already initialized")
                )
            )
        else:
            # Server-to-client types echoed back are a protocol violation.
            self.outbox.put_control(
                encode_message(
                    ErrorMessage(code="bad_message", message=f"unexpected {msg.type}")
                )
            )


def make_app(
    default_config: FileConfig | None = None,
    fps: float = 20.0,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; one independent session per WebSocket connection."""
    if fps <= 0:
        raise QLatticeError(f"fps must be > 0, got {fps}")
    config = default_config if default_config is not None else FileConfig()
    app = FastAPI(title="qlattice service")

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket) -> None:
        await _Connection(ws, config, fps).run()

    if ui_dir is not None:
        path = Path(ui_dir)
        if path.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=path, html=True), name="ui")
    return app
