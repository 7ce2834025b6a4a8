"""Command line driver: headless scenario runs, exports, oracle checks and
micro-benchmarks, plus the development server."""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    FileConfig,
    load_config_file,
    load_scenario_file,
    session_from_config,
)
from .errors import QLatticeError, UnstableStepError
from .evolve import dense_oracle_evolve, step
from .grid import GridSpec
from .model import DisplayChannel, ModelParams, ParticleSpec
from .render import marginal_csv, render_frame_image, stats_csv, write_ppm
from .session import FrameRecord, run_scenario
from .state import WaveFunction, normalize

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


@dataclass
class ExportSpec:
    """What cmd_run writes per frame."""

    formats: set[str] = field(default_factory=set)  # subset of {"ppm", "csv"}
    out_dir: Path = Path("out")
    gamma: float = 0.5
    every_k_frames: int = 1

    def __post_init__(self):
        unknown = self.formats - {"ppm", "csv"}
        if unknown:
            raise QLatticeError(f"unknown export formats: {sorted(unknown)}")
        if not 0 < self.gamma <= 1:
            raise QLatticeError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.every_k_frames < 1:
            raise QLatticeError("every_k_frames must be >= 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlattice",
        description="Multiparticle quantum simulator on a periodic 2D grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headless and export frames")
    run.add_argument("--config", required=True, help="JSON configuration file")
    run.add_argument("--scenario", help="JSON scenario (array of events)")
    run.add_argument("--frames", type=int, default=10, help="frames to advance")
    run.add_argument("--export", help="comma-separated formats: ppm,csv")
    run.add_argument("--out", default="out", help="export directory")
    run.add_argument("--gamma", type=float, default=0.5, help="image gamma in (0,1]")
    run.add_argument("--seed", type=int, help="override the configured RNG seed")

    oracle = sub.add_parser("oracle", help="compare the explicit step against the dense propagator")
    oracle.add_argument("--grid", required=True, help="dimensions, e.g. 3x3")
    oracle.add_argument("--particles", type=int, required=True)
    oracle.add_argument("--dt", required=True, help="comma-separated step sizes")
    oracle.add_argument("--seed", type=int, default=0)

    bench = sub.add_parser("bench", help="measure stepping throughput")
    bench.add_argument("--config", required=True)
    bench.add_argument("--frames", type=int, default=50)

    serve = sub.add_parser("serve", help="host the streaming service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--config", help="default session configuration")
    serve.add_argument("--fps", type=float, default=20.0)
    serve.add_argument("--ui", help="directory with the built web UI")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "serve":
            return cmd_serve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableStepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    raise AssertionError("unreachable")


def entrypoint() -> None:
    sys.exit(main())


# ----------------------------------------------------------------- run


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config_file(args.config)
    events = load_scenario_file(args.scenario) if args.scenario else []
    if args.frames < 1:
        raise ConfigError("--frames must be >= 1")
    export: ExportSpec | None = None
    if args.export:
        formats = {f.strip() for f in args.export.split(",") if f.strip()}
        if not formats:
            raise ConfigError("--export given but no formats listed")
        export = ExportSpec(formats=formats, out_dir=Path(args.out), gamma=args.gamma)

    session = session_from_config(config, seed=args.seed)
    try:
        records = run_scenario(session, events, args.frames)
    except UnstableStepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    if export is not None:
        _write_exports(records, session, export)
    last = records[-1].stats
    clicks = sum(len(r.outcomes) for r in records)
    print(
        f"ran {len(records)} frames to t={last.t:.6g}; "
        f"total_energy={last.total_energy:.6g}; measurements={clicks}"
    )
    return EXIT_OK


def _display_channels(model: ModelParams) -> tuple[list[int], list[DisplayChannel]]:
    """Particles to draw and their channels; defaults to RGB order."""
    chosen = [
        (k, p.display_channel)
        for k, p in enumerate(model.particles)
        if p.display_channel is not DisplayChannel.NONE
    ]
    if not chosen:
        order = (DisplayChannel.RED, DisplayChannel.GREEN, DisplayChannel.BLUE)
        chosen = list(zip(range(min(3, model.n_particles)), order))
    if len(chosen) > 3:
        raise ConfigError("at most three particles can have display channels")
    return [k for k, _ in chosen], [c for _, c in chosen]


def _write_exports(records: list[FrameRecord], session, export: ExportSpec) -> None:
    out = export.out_dir
    out.mkdir(parents=True, exist_ok=True)
    n = session.model.n_particles
    (out / "stats.csv").write_text(
        stats_csv([r.stats for r in records], n), encoding="ascii"
    )
    indices, channels = _display_channels(session.model)
    for record in records:
        if (record.frame - 1) % export.every_k_frames and record is not records[-1]:
            continue
        stem = f"frame_{record.frame:06d}"
        if "csv" in export.formats:
            (out / f"{stem}.csv").write_text(
                marginal_csv(record.marginals), encoding="ascii"
            )
        if "ppm" in export.formats:
            image = render_frame_image(
                [record.marginals[k] for k in indices], export.gamma, channels
            )
            (out / f"{stem}.ppm").write_bytes(write_ppm(image))


# --------------------------------------------------------------- oracle


def _parse_grid(text: str) -> GridSpec:
    try:
        m_text, n_text = text.lower().split("x")
        return GridSpec(m=int(m_text), n=int(n_text))
    except (ValueError, QLatticeError) as exc:
        raise ConfigError(f"bad --grid {text!r}: {exc}") from exc


def cmd_oracle(args: argparse.Namespace) -> int:
    grid = _parse_grid(args.grid)
    if args.particles < 1:
        raise ConfigError("--particles must be >= 1")
    try:
        dts = [float(d) for d in args.dt.split(",") if d.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --dt list: {exc}") from exc
    if not dts:
        raise ConfigError("--dt list is empty")
    params = ModelParams(
        hbar=1.0,
        particles=tuple(
            ParticleSpec(mass=1.0, spring_k=1.0) for _ in range(args.particles)
        ),
    )
    size = grid.size(args.particles)
    print(f"grid {grid.m}x{grid.n}, {args.particles} particles, {size} amplitudes")
    rng = np.random.default_rng(args.seed)
    amp = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    psi = normalize(WaveFunction(grid, args.particles, amp))

    single_errors = []
    for dt in dts:
        exact = dense_oracle_evolve(psi, params, dt)
        euler, _ = step(psi, params, dt)
        single = float(np.linalg.norm(euler.amplitudes - exact.amplitudes))
        cur = psi
        for _ in range(10):
            cur, _ = step(cur, params, dt)
        exact10 = dense_oracle_evolve(psi, params, 10 * dt)
        ten = float(np.linalg.norm(cur.amplitudes - exact10.amplitudes))
        single_errors.append(single)
        print(f"dt={dt:.9g} single_step_l2={single:.6e} ten_step_l2={ten:.6e}")
    for a, b, ea, eb in zip(dts, dts[1:], single_errors, single_errors[1:]):
        ratio = ea / eb if eb else float("inf")
        print(f"order_ratio dt={a:.9g} -> dt={b:.9g}: {ratio:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------- bench


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_config_file(args.config)
    if args.frames < 1:
        raise ConfigError("--frames must be >= 1")
    session = session_from_config(config)
    size = session.grid.size(session.model.n_particles)
    n = session.model.n_particles
    stencil_points = 4 * n + 1
    print(
        f"amplitudes={size} (= ({session.grid.m}*{session.grid.n})^{n}); "
        f"one more particle multiplies state size by {session.grid.cells}"
    )
    start = time.perf_counter()
    for _ in range(args.frames):
        session.advance_frame()
    elapsed = time.perf_counter() - start
    steps = args.frames * session.sim.steps_per_frame
    rate = steps / elapsed if elapsed > 0 else float("inf")
    throughput = rate * size * stencil_points
    checksum = hashlib.sha256(session.psi.amplitudes.tobytes()).hexdigest()[:16]
    print(f"steps={steps} elapsed={elapsed:.3f}s steps_per_second={rate:.1f}")
    print(f"stencil_point_throughput={throughput:.3e} per_second")
    print(f"workload_checksum={checksum}")
    return EXIT_OK


# ---------------------------------------------------------------- serve


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import make_app

    config = load_config_file(args.config) if args.config else FileConfig()
    app = make_app(default_config=config, fps=args.fps, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK
