"""Frame rendering and tabular export.

Each displayed particle maps to one primary color channel. A channel is
scaled against that particle's own maximum probability (so a tightly peaked
and a widely spread particle are both visible) and gamma-compressed to lift
low-probability structure. The same rule is applied client-side by the web
UI; keep the two in sync.
"""

from __future__ import annotations

import numpy as np

from .errors import QLatticeError
from .model import DisplayChannel
from .session import FrameStats
from .state import Marginal2D

_CHANNEL_INDEX = {
    DisplayChannel.RED: 0,
    DisplayChannel.GREEN: 1,
    DisplayChannel.BLUE: 2,
}
_DEFAULT_ORDER = (DisplayChannel.RED, DisplayChannel.GREEN, DisplayChannel.BLUE)


def render_frame_image(
    marginals: list[Marginal2D],
    gamma: float = 0.5,
    channels: list[DisplayChannel] | None = None,
) -> np.ndarray:
    """RGB image of up to three marginals, shape (n, m, 3) uint8.

    channel value = round(255 * (P/maxP)**gamma), 0 where maxP == 0.
    Rows follow ay top-to-bottom, columns ax left-to-right.
    """
    if not 0 < gamma <= 1:
        raise QLatticeError(f"gamma must be in (0, 1], got {gamma}")
    if not 1 <= len(marginals) <= 3:
        raise QLatticeError("render_frame_image takes 1 to 3 marginals")
    grid = marginals[0].grid
    if any(m.grid != grid for m in marginals):
        raise QLatticeError("marginals rendered together must share a grid")
    if channels is None:
        channels = list(_DEFAULT_ORDER[: len(marginals)])
    if len(channels) != len(marginals):
        raise QLatticeError("one display channel per marginal required")
    image = np.zeros((grid.n, grid.m, 3), dtype=np.uint8)
    for marg, channel in zip(marginals, channels):
        if channel is DisplayChannel.NONE:
            continue
        peak = float(marg.values.max())
        if peak <= 0.0:
            continue
        scaled = np.round(255.0 * (marg.values / peak) ** gamma)
        image[:, :, _CHANNEL_INDEX[channel]] = scaled.T.astype(np.uint8)
    return image


def write_ppm(image: np.ndarray) -> bytes:
    """Binary P6 encoding of an (n, m, 3) uint8 image."""
    n, m, depth = image.shape
    if depth != 3 or image.dtype != np.uint8:
        raise QLatticeError("expected an (n, m, 3) uint8 image")
    header = f"P6\n{m} {n}\n255\n".encode("ascii")
    return header + image.tobytes()


def _fmt(value: float) -> str:
    return format(value, ".17g")


def marginal_csv(marginals: list[Marginal2D]) -> str:
    """Lossless CSV of per-cell probabilities.

    Header ax,ay,p1..pN; rows ordered ay ascending (outer), ax ascending
    (inner); 17 significant digits.
    """
    if not marginals:
        raise QLatticeError("no marginals to export")
    grid = marginals[0].grid
    if any(m.grid != grid for m in marginals):
        raise QLatticeError("marginals exported together must share a grid")
    lines = ["ax,ay," + ",".join(f"p{k + 1}" for k in range(len(marginals)))]
    for ay in range(grid.n):
        for ax in range(grid.m):
            probs = ",".join(_fmt(float(m.values[ax, ay])) for m in marginals)
            lines.append(f"{ax},{ay},{probs}")
    return "\n".join(lines) + "\n"


def stats_csv_header(n_particles: int) -> str:
    cols = ["frame", "t", "pre_norm", "total_energy"]
    cols += [f"kin_{k}" for k in range(n_particles)]
    for k in range(n_particles):
        cols += [f"ex_{k}", f"ey_{k}"]
    cols += ["cm_x", "cm_y"]
    return ",".join(cols)


def stats_csv_row(stats: FrameStats) -> str:
    fields = [str(stats.frame), _fmt(stats.t), _fmt(stats.pre_norm), _fmt(stats.total_energy)]
    fields += [_fmt(k) for k in stats.kinetic]
    for x, y in stats.expected_pos:
        fields += [_fmt(x), _fmt(y)]
    fields += [_fmt(stats.cm[0]), _fmt(stats.cm[1])]
    return ",".join(fields)


def stats_csv(stats_list: list[FrameStats], n_particles: int) -> str:
    lines = [stats_csv_header(n_particles)]
    lines += [stats_csv_row(s) for s in stats_list]
    return "\n".join(lines) + "\n"
