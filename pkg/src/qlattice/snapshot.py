"""Binary session snapshots.

Layout (all integers little-endian):

    magic   4 bytes  b"QLPS"
    version u32      currently 1
    clen    u64      config blob length in bytes
    config  clen bytes of canonical JSON (sorted keys, compact), UTF-8
    count   u64      amplitude count
    amps    count * 16 bytes: interleaved float64 (re, im) pairs
    rlen    u32      RNG state blob length
    rng     rlen bytes of canonical JSON (PCG64 bit-generator state)

Loading reproduces the session amplitude-exactly and RNG-exactly, so a
snapshot round-trip commutes with any number of further frames.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import SnapshotError
from .grid import GridSpec
from .initial import GaussianSpec
from .model import DisplayChannel, ModelParams, ParticleSpec, PotentialMode, SimConfig
from .session import Session, SessionStatus
from .state import WaveFunction

MAGIC = b"QLPS"
VERSION = 1


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _config_dict(session: Session) -> dict:
    g, m, s = session.grid, session.model, session.sim
    return {
        "grid": {"m": g.m, "n": g.n, "dx": g.dx, "dy": g.dy},
        "model": {
            "hbar": m.hbar,
            "potential_mode": m.potential_mode.value,
            "particles": [
                {
                    "mass": p.mass,
                    "spring_k": p.spring_k,
                    "display_channel": p.display_channel.value,
                }
                for p in m.particles
            ],
        },
        "sim": {
            "dt": s.dt,
            "dt_safety": s.dt_safety,
            "steps_per_frame": s.steps_per_frame,
            "seed": s.seed,
        },
        "initial_state": [
            {"center": list(sp.center), "width": sp.width, "momentum": list(sp.momentum)}
            for sp in session.initial
        ],
        "total_steps": session.total_steps,
        "frame_no": session.frame_no,
        "status": session.status.value,
        "last_pre_norm": session._last_pre_norm,
    }


def save_snapshot(session: Session) -> bytes:
    config = _canonical_json(_config_dict(session))
    amps = np.ascontiguousarray(session.psi.amplitudes, dtype="<c16").tobytes()
    rng_blob = _canonical_json(session.rng.bit_generator.state)
    return b"".join(
        [
            MAGIC,
            struct.pack("<I", VERSION),
            struct.pack("<Q", len(config)),
            config,
            struct.pack("<Q", session.psi.amplitudes.shape[0]),
            amps,
            struct.pack("<I", len(rng_blob)),
            rng_blob,
        ]
    )


def load_snapshot(data: bytes) -> Session:
    cursor = _Cursor(data)
    if cursor.take(4, "magic") != MAGIC:
        raise SnapshotError("not_a_snapshot", "not a snapshot: bad magic bytes")
    (version,) = struct.unpack("<I", cursor.take(4, "version"))
    if version != VERSION:
        raise SnapshotError(
            "version_mismatch", f"unsupported snapshot version {version}"
        )
    (clen,) = struct.unpack("<Q", cursor.take(8, "config length"))
    try:
        config = json.loads(cursor.take(clen, "config blob").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotError("bad_config", f"unreadable config blob: {exc}") from exc
    (count,) = struct.unpack("<Q", cursor.take(8, "amplitude count"))
    amp_bytes = cursor.take(count * 16, "amplitudes")
    (rlen,) = struct.unpack("<I", cursor.take(4, "rng length"))
    try:
        rng_state = json.loads(cursor.take(rlen, "rng blob").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotError("bad_config", f"unreadable rng blob: {exc}") from exc
    return _rebuild(config, amp_bytes, count, rng_state)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.pos + size
        if end > len(self.data):
            raise SnapshotError("truncated", f"truncated snapshot while reading {what}")
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk


def _rebuild(config: dict, amp_bytes: bytes, count: int, rng_state: dict) -> Session:
    try:
        g = config["grid"]
        grid = GridSpec(m=g["m"], n=g["n"], dx=g["dx"], dy=g["dy"])
        mo = config["model"]
        model = ModelParams(
            hbar=mo["hbar"],
            potential_mode=PotentialMode(mo["potential_mode"]),
            particles=tuple(
                ParticleSpec(
                    mass=p["mass"],
                    spring_k=p["spring_k"],
                    display_channel=DisplayChannel(p["display_channel"]),
                )
                for p in mo["particles"]
            ),
        )
        si = config["sim"]
        sim = SimConfig(
            dt=si["dt"],
            dt_safety=si["dt_safety"],
            steps_per_frame=si["steps_per_frame"],
            seed=si["seed"],
        )
        initial = tuple(
            GaussianSpec(
                center=tuple(sp["center"]),
                width=sp["width"],
                momentum=tuple(sp["momentum"]),
            )
            for sp in config["initial_state"]
        )
        session = Session(model, grid, sim, initial)
        expected = grid.size(model.n_particles)
        if count != expected:
            raise SnapshotError(
                "bad_config",
                f"amplitude count {count} does not match configuration ({expected})",
            )
        amps = np.frombuffer(amp_bytes, dtype="<c16").astype(np.complex128)
        session.psi = WaveFunction(grid, model.n_particles, amps)
        session.total_steps = int(config["total_steps"])
        session.frame_no = int(config["frame_no"])
        session.status = SessionStatus(config["status"])
        session._last_pre_norm = float(config["last_pre_norm"])
        bit_gen = np.random.PCG64()
        bit_gen.state = rng_state
        session.rng = np.random.Generator(bit_gen)
        return session
    except SnapshotError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError("bad_config", f"invalid snapshot config: {exc}") from exc
