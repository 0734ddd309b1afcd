"""Split-step spectral propagation of i psi_t = -psi_xx/2 - w2(t) (x - x0)**2 psi / 2."""
from dataclasses import dataclass

import numpy as np

from .envelope import Free
from .errors import BlowupError, StabilityError
from .wavefield import GridWave

__all__ = [
    "PotentialSpec",
    "StepPlan",
    "potential_values",
    "wavenumbers",
    "absorber_profile",
    "split_step_evolve",
]


@dataclass(frozen=True)
class PotentialSpec:
    law: object = Free()
    center: float = 0.0


@dataclass(frozen=True)
class StepPlan:
    """Time stepping and absorber settings.

    The absorber is an imaginary potential ``-i*strength*r(x)`` where ``r``
    ramps from 0 to 1 as ``sin**2`` across an edge zone of
    ``absorber_width`` times the domain length on each side; ``strength``
    is therefore a damping rate (1/time). ``strength = 0`` switches it off.
    """

    dt: float
    n_steps: int
    record_every: int = 1
    absorber_width: float = 0.1
    absorber_strength: float = 80.0

    def __post_init__(self):
        if not self.dt > 0:
            raise StabilityError("dt must be positive")
        if self.n_steps < 0:
            raise StabilityError("n_steps must be non-negative")
        if self.record_every < 1:
            raise StabilityError("record_every must be >= 1")
        if not 0.0 <= self.absorber_width <= 0.25:
            raise StabilityError("absorber_width must lie in [0, 0.25]")
        if self.absorber_strength < 0:
            raise StabilityError("absorber_strength must be non-negative")


def potential_values(pot, grid, t):
    """``V(x, t) = -w2(t) (x - center)**2 / 2`` on the grid."""
    return -0.5 * pot.law.omega_sq(t) * (grid.x - pot.center) ** 2


def wavenumbers(grid):
    """Angular wavenumbers ``2 pi j / (x_max - x_min)`` in FFT order."""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)


def absorber_profile(grid, width):
    """Ramp ``r(x)`` in [0, 1]: zero in the bulk, ``sin**2`` rise toward each edge."""
    r = np.zeros(grid.n)
    zone = width * grid.length
    if zone <= 0:
        return r
    x = grid.x
    depth_left = (grid.x_min + zone - x) / zone
    depth_right = (x - (grid.x_max - zone)) / zone
    depth = np.clip(np.maximum(depth_left, depth_right), 0.0, 1.0)
    return np.sin(0.5 * np.pi * depth) ** 2


def split_step_evolve(psi0, pot, plan, *, t0=0.0, check=True):
    """Evolve `psi0` with Strang splitting; return ``[(t, GridWave), ...]``.

    One step is half a potential kick, a full kinetic step in Fourier
    space, and another half kick. The potential (and the absorber, folded
    in as its imaginary part) is sampled at the step midpoint, keeping the
    scheme second order for time-dependent w2(t). Snapshots are taken at
    ``t0`` and every ``record_every`` steps.

    Raises
    ------
    StabilityError
        If ``max|V| dt >= 0.5`` or ``max(k**2/2) dt >= pi`` (with `check`).
    BlowupError
        If the norm grows above 1.01 times its initial value.
    """
    grid = psi0.grid
    dt = plan.dt
    k = wavenumbers(grid)
    kin = np.exp(-0.5j * dt * k * k)
    mid_times = t0 + dt * (np.arange(plan.n_steps) + 0.5)
    w2 = np.asarray(pot.law.omega_sq(mid_times), dtype=float) if plan.n_steps else np.zeros(0)
    r2 = (grid.x - pot.center) ** 2
    if check and plan.n_steps:
        vmax = 0.5 * float(np.max(np.abs(w2), initial=0.0)) * float(r2.max())
        if vmax * dt >= 0.5:
            raise StabilityError(f"max|V|*dt = {vmax * dt:.3g} >= 0.5; reduce dt or the grid")
        kmax = 0.5 * float(np.max(k * k)) * dt
        if kmax >= np.pi:
            raise StabilityError(f"max(k^2/2)*dt = {kmax:.3g} >= pi; reduce dt or refine less")

    damp = None
    if plan.absorber_strength > 0 and plan.absorber_width > 0:
        damp = np.exp(-0.5 * dt * plan.absorber_strength * absorber_profile(grid, plan.absorber_width))

    psi = np.array(psi0.amplitudes, dtype=complex)
    norm0 = float(np.sum(np.abs(psi) ** 2))
    snapshots = [(t0, psi0)]
    last_w2 = None
    half = None
    for step in range(plan.n_steps):
        if last_w2 is None or w2[step] != last_w2:
            half = np.exp(0.25j * dt * w2[step] * r2)
            if damp is not None:
                half = half * damp
            last_w2 = w2[step]
        psi = half * np.fft.ifft(kin * np.fft.fft(half * psi))
        if (step + 1) % plan.record_every == 0:
            nrm = float(np.sum(np.abs(psi) ** 2))
            if nrm > 1.01 * norm0 or not np.isfinite(nrm):
                raise BlowupError(f"norm grew to {nrm / norm0:.4g}x at step {step + 1}")
            snapshots.append((t0 + (step + 1) * dt, GridWave(grid, psi)))
    return snapshots
