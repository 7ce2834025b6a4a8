"""Physical model parameters: per-particle masses, spring constants, hbar."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import QLatticeError


class DisplayChannel(str, Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    NONE = "none"


class PotentialMode(str, Enum):
    """How particle coordinates enter the binding potential on the torus.

    RAW uses coordinates as stored, so the potential is discontinuous across
    the periodic seam. MINIMAL_IMAGE first shifts every particle to the
    periodic image nearest particle 0, which removes the seam at the cost of
    an anchor choice.
    """

    RAW = "raw"
    MINIMAL_IMAGE = "minimal_image"


@dataclass(frozen=True)
class ParticleSpec:
    """Mass, spring constant and display color of one particle."""

    mass: float
    spring_k: float = 0.0
    display_channel: DisplayChannel = DisplayChannel.NONE

    def __post_init__(self):
        if not self.mass > 0:
            raise QLatticeError(f"particle mass must be > 0, got {self.mass}")
        if self.spring_k < 0:
            raise QLatticeError(f"particle spring_k must be >= 0, got {self.spring_k}")


@dataclass(frozen=True)
class ModelParams:
    """hbar plus the ordered particle list.

    Every particle is attached by a zero-rest-length spring to the common
    force-balance center, so for two or more particles the total spring
    constant must be positive.
    """

    hbar: float
    particles: tuple[ParticleSpec, ...]
    potential_mode: PotentialMode = PotentialMode.RAW

    def __post_init__(self):
        if not self.hbar > 0:
            raise QLatticeError(f"hbar must be > 0, got {self.hbar}")
        if len(self.particles) < 1:
            raise QLatticeError("at least one particle required")
        if len(self.particles) >= 2 and not self.total_spring() > 0:
            raise QLatticeError("degenerate binding: total spring constant is zero")

    @property
    def n_particles(self) -> int:
        return len(self.particles)

    def total_spring(self) -> float:
        """K, the sum of all spring constants. Always recomputed."""
        return float(sum(p.spring_k for p in self.particles))


@dataclass(frozen=True)
class SimConfig:
    """Time stepping and reproducibility knobs.

    dt == 0 is tolerated for diagnostic no-op stepping; production configs
    use dt > 0 (or leave it to the automatic stability heuristic).
    """

    dt: float
    dt_safety: float = 0.1
    steps_per_frame: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dt < 0:
            raise QLatticeError(f"sim.dt must be >= 0, got {self.dt}")
        if not 0 < self.dt_safety <= 1:
            raise QLatticeError(f"sim.dt_safety must be in (0, 1], got {self.dt_safety}")
        if self.steps_per_frame < 1:
            raise QLatticeError(f"sim.steps_per_frame must be >= 1, got {self.steps_per_frame}")
