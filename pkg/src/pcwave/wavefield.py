"""Construction of exact parabolic cylinder waves and reference waves on a grid.

In the comoving frame the wave is the stationary solution

    phi(x') = D_lam(sqrt(2) * exp(i (2n-1) pi/4) * (a0 / omega0**1.5 + sqrt(omega0) x'))

of ``-phi''/2 - (omega0**2 x'**2 / 2 + a0 x') phi = E phi``. The lab-frame
wave adds the scale factor, a chirp and the envelope phases (see
:func:`build_psi`).
"""
from dataclasses import dataclass
import cmath
import math

import numpy as np

from . import pcf
from .errors import DegenerateError, DomainError, GridError, GridMismatchError

__all__ = [
    "GridSpec",
    "GridWave",
    "BranchParams",
    "pcf_order",
    "pcf_argument",
    "build_phi",
    "build_psi",
    "truncate",
    "superpose",
    "build_airy_reference",
    "build_gaussian",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid ``x_j = x_min + j*dx``, ``dx = (x_max - x_min)/n``."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise GridError("x_max must exceed x_min")
        n = int(self.n)
        if n < 256 or n & (n - 1):
            raise GridError(f"n must be a power of two >= 256, got {self.n}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def length(self):
        return self.x_max - self.x_min


@dataclass(frozen=True, eq=False)
class GridWave:
    """Complex wave function sampled on a :class:`GridSpec`. Immutable."""

    grid: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} amplitudes, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DegenerateError("wave contains non-finite values")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def x(self):
        return self.grid.x

    @property
    def intensity(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        """L2 norm ``sqrt(sum |psi|^2 dx)``."""
        return math.sqrt(float(np.sum(self.intensity)) * self.grid.dx)

    def normalize(self):
        peak = np.max(np.abs(self.amplitudes))
        if not peak > 0:
            raise DegenerateError("cannot normalize a zero wave")
        a = self.amplitudes / peak
        nrm = math.sqrt(float(np.sum(np.abs(a) ** 2)) * self.grid.dx)
        return GridWave(self.grid, a / nrm)

    def peak_normalized_intensity(self):
        """Intensity scaled so the main peak equals one."""
        inten = self.intensity
        return inten / inten.max()

    def scaled(self, c):
        return GridWave(self.grid, complex(c) * self.amplitudes)


@dataclass(frozen=True)
class BranchParams:
    """Parameters of one exact wave: branch n, a0, omega0, E."""

    n: int
    a0: float
    omega0: float
    E: float = 0.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise DomainError("branch index must be 1 or 2")
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive for the parabolic cylinder wave")


def pcf_order(n, a0, omega0, E=0.0):
    """Order lambda_n of the parabolic cylinder function for branch n.

    ``lambda_1 = ( i a0**2 - 2i E omega0**2 - omega0**3) / (2 omega0**3)``,
    ``lambda_2 = (-i a0**2 + 2i E omega0**2 - omega0**3) / (2 omega0**3)``.
    """
    sign = 1.0 if n == 1 else -1.0
    w3 = omega0 ** 3
    return complex(-0.5, sign * (a0 ** 2 - 2.0 * E * omega0 ** 2) / (2.0 * w3))


def _ray_direction(n):
    # principal branches: (-1)**(1/4) -> e^{i pi/4}, (-1)**(3/4) -> e^{3i pi/4}
    return cmath.exp(1j * math.pi * (2 * n - 1) / 4)


def pcf_argument(n, a0, omega0, xprime):
    """Complex argument of D for comoving coordinate(s) `xprime`."""
    xprime = np.asarray(xprime, dtype=float)
    return math.sqrt(2.0) * _ray_direction(n) * (a0 / omega0 ** 1.5 + math.sqrt(omega0) * xprime)


def build_phi(params, xprime, *, rtol=1e-10):
    """Comoving profile phi(x') of the exact wave at arbitrary points.

    The argument of D runs along a straight complex ray through the origin;
    values are obtained by marching Weber's equation outward from the origin
    (where the series is exact) in both directions.
    """
    xprime = np.asarray(xprime, dtype=float)
    lam = pcf_order(params.n, params.a0, params.omega0, params.E)
    d = _ray_direction(params.n)
    s = math.sqrt(2.0 * params.omega0) * (xprime + params.a0 / params.omega0 ** 2)
    flat = s.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for sign, sel in ((1.0, np.nonzero(flat >= 0)[0]), (-1.0, np.nonzero(flat < 0)[0])):
        if sel.size == 0:
            continue
        order = sel[np.argsort(np.abs(flat[sel]), kind="stable")]
        path = np.abs(flat[order]) * (sign * d)
        out[order] = pcf.pcf_d_march(lam, 0j, path, rtol=rtol)
    return out.reshape(s.shape)


def build_psi(params, env, grid, *, center=0.0, rtol=1e-10):
    """Exact self-accelerating wave at envelope state `env`, sampled on `grid`.

    ``psi = L**-0.5 exp(i[xc'(X-xc) + L'/(2L) (X-xc)**2 + S - Theta]) phi((X-xc)/L)``
    with ``X = x - center`` measured from the potential maximum. The result is
    not normalized (the ideal wave is not square integrable).
    """
    if not env.L > 0:
        raise DomainError("scale factor must be positive")
    X = grid.x - center
    r = X - env.xc
    phase = env.xcdot * r + env.Ldot / (2.0 * env.L) * r * r + env.S - env.Theta
    phi = build_phi(params, r / env.L, rtol=rtol)
    return GridWave(grid, np.exp(1j * phase) * phi / math.sqrt(env.L))


def truncate(wave, eps, center=0.0):
    """Gaussian truncation ``N exp(-eps (x - center)**2) psi``, unit norm.

    ``eps = 0`` only renormalizes, so truncating a truncated wave again with
    zero strength returns it unchanged.
    """
    if not eps >= 0:
        raise DomainError("truncation parameter must be non-negative")
    a = wave.amplitudes
    peak = np.max(np.abs(a))
    if not peak > 0:
        raise DegenerateError("cannot truncate a zero wave")
    a = a / peak * np.exp(-eps * (wave.x - center) ** 2)
    nrm2 = float(np.sum(np.abs(a) ** 2)) * wave.grid.dx
    if nrm2 < 1e-300:
        raise DegenerateError("truncated norm underflowed")
    return GridWave(wave.grid, a / math.sqrt(nrm2))


def superpose(w1, w2, c1=1.0, c2=1.0):
    """Pointwise ``c1*w1 + c2*w2``."""
    if w1.grid != w2.grid:
        raise GridMismatchError("waves live on different grids")
    return GridWave(w1.grid, complex(c1) * w1.amplitudes + complex(c2) * w2.amplitudes)


def build_airy_reference(grid, *, decay=0.1, scale=2.0 ** (1.0 / 3.0)):
    """Truncated Airy wave ``exp(decay x) Ai(scale x)``, unit norm."""
    x = grid.x
    return GridWave(grid, np.exp(decay * x) * pcf.airy_ai(scale * x)).normalize()


def build_gaussian(grid, center, width_param):
    """Gaussian ``exp(-(x - center)**2 / width_param)``, unit norm."""
    if not width_param > 0:
        raise DomainError("width_param must be positive")
    return GridWave(grid, np.exp(-(grid.x - center) ** 2 / width_param)).normalize()
