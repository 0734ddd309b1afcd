"""Envelope dynamics: scale factor L(t), translation x_c(t) and the phases.

The exact self-accelerating waves are stationary in the frame
``x' = (x - x_c) / L``; the frame itself obeys

    L''   = w2(t) L   - omega0**2 / L**3
    x_c'' = w2(t) x_c - a0 / L**3

with ``w2(t)`` the (time dependent) squared frequency of the inverted
oscillator. Two phases ride along: ``S' = x_c'**2 / 2 + w2 x_c**2 / 2`` and
``Theta' = E / L**2``.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import BlowupError, DomainError, GridError

__all__ = [
    "OmegaLaw",
    "Free",
    "Constant",
    "Breathing",
    "Tabulated",
    "EnvelopeState",
    "integrate_envelope",
    "closed_form_free_L",
    "closed_form_constant",
    "constant_state",
    "breathing_omega_sq",
    "envelope_residual",
]


class OmegaLaw:
    """Squared frequency w2(t) of the inverted harmonic potential."""

    def omega_sq(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class Free(OmegaLaw):
    """No potential, w2 = 0."""

    def omega_sq(self, t):
        return 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0


@dataclass(frozen=True)
class Constant(OmegaLaw):
    omega_sq_value: float

    def omega_sq(self, t):
        if np.ndim(t):
            return np.full(np.shape(t), float(self.omega_sq_value))
        return float(self.omega_sq_value)


@dataclass(frozen=True)
class Breathing(OmegaLaw):
    """Law that makes ``L = x_c = 1 + eps*sin(omega0*t)`` an exact envelope."""

    eps: float
    omega0: float

    def __post_init__(self):
        if not abs(self.eps) < 1:
            raise DomainError("breathing law requires |eps| < 1")

    def omega_sq(self, t):
        return breathing_omega_sq(self.eps, self.omega0, t)


@dataclass(frozen=True)
class Tabulated(OmegaLaw):
    """Piecewise-linear w2(t); constant beyond the table ends."""

    times: tuple
    omega_sq_values: tuple

    def __post_init__(self):
        times = tuple(float(v) for v in self.times)
        values = tuple(float(v) for v in self.omega_sq_values)
        if len(times) != len(values) or len(times) < 1:
            raise DomainError("tabulated law needs equal-length, non-empty tables")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("tabulated times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "omega_sq_values", values)

    def omega_sq(self, t):
        out = np.interp(t, self.times, self.omega_sq_values)
        return out if np.ndim(t) else float(out)


@dataclass(frozen=True)
class EnvelopeState:
    """Instantaneous envelope values; phases in radians (hbar = 1)."""

    t: float = 0.0
    L: float = 1.0
    Ldot: float = 0.0
    xc: float = 0.0
    xcdot: float = 0.0
    S: float = 0.0
    Theta: float = 0.0

    def as_array(self):
        return np.array([self.L, self.Ldot, self.xc, self.xcdot, self.S, self.Theta])

    @classmethod
    def from_array(cls, t, y):
        return cls(float(t), *(float(v) for v in y))


def _rhs(law, a0, omega0, E):
    w0sq = omega0 * omega0

    def f(t, y):
        L, Ld, xc, xcd = y[0], y[1], y[2], y[3]
        w2 = law.omega_sq(t)
        L3 = L * L * L
        return np.array([
            Ld,
            w2 * L - w0sq / L3,
            xcd,
            w2 * xc - a0 / L3,
            0.5 * xcd * xcd + 0.5 * w2 * xc * xc,
            E / (L * L),
        ])
    return f


def _check(y, t):
    if not y[0] > 1e-8:
        raise BlowupError(f"scale factor collapsed (L={y[0]:.3g}) at t={t:.6g}")
    if not np.all(np.abs(y) < 1e12):
        raise BlowupError(f"envelope state exceeded 1e12 at t={t:.6g}")


def integrate_envelope(law, init, t_grid, *, a0, omega0, E=0.0, max_substep=1e-3):
    """Integrate the envelope equations with classical RK4.

    Parameters
    ----------
    law : OmegaLaw
        Squared frequency of the potential.
    init : EnvelopeState
        State at ``t_grid[0]`` (its ``t`` field must match).
    t_grid : array_like
        Strictly monotonic output times; decreasing grids integrate backward.
    a0, omega0, E : float
        Parameters of the wave family (self-acceleration, width frequency,
        comoving energy).
    max_substep : float
        Largest RK4 step between output points.

    Returns
    -------
    list of EnvelopeState
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise GridError("t_grid must be a non-empty 1-D sequence")
    if not math.isclose(t_grid[0], init.t, rel_tol=0, abs_tol=1e-12):
        raise GridError("t_grid must start at init.t")
    steps = np.diff(t_grid)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise GridError("t_grid must be strictly monotonic")
    f = _rhs(law, a0, omega0, E)
    y = init.as_array()
    _check(y, init.t)
    out = [replace(init, t=float(t_grid[0]))]
    for ta, tb in zip(t_grid[:-1], t_grid[1:]):
        n = max(1, int(math.ceil(abs(tb - ta) / max_substep - 1e-9)))
        h = (tb - ta) / n
        t = ta
        for i in range(n):
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t = ta + (i + 1) * h
            _check(y, t)
        out.append(EnvelopeState.from_array(tb, y))
    return out


def closed_form_free_L(omega0, omega1, t):
    """Free-space scale factor ``sqrt(1 + 2 t sqrt(omega0**2 + omega1**2) + omega1**2 t**2)``.

    Its initial slope is ``sqrt(omega0**2 + omega1**2)``.
    """
    rad = 1.0 + 2.0 * t * math.hypot(omega0, omega1) + omega1 ** 2 * t ** 2
    if rad <= 0:
        raise DomainError(f"non-positive radicand {rad:g} at t={t:g}")
    return math.sqrt(rad)


def closed_form_constant(omega0, c, a0, x0, t):
    """Closed-form envelope for a constant potential w2 = omega0**2.

    Returns ``(L, x_c)`` with
    ``L = sqrt(sqrt(1 - 4 omega0**2 c**2) + 2 c omega0 sinh(2 omega0 t))`` and
    ``x_c = (a0/omega0**2) L + x0 sinh(omega0 t)``. ``c = 0`` gives ``L = 1``.
    """
    inner = 1.0 - 4.0 * omega0 ** 2 * c ** 2
    if inner < 0:
        raise DomainError("require 4 omega0**2 c**2 <= 1")
    rad = math.sqrt(inner) + 2.0 * c * omega0 * math.sinh(2.0 * omega0 * t)
    if rad <= 0:
        raise DomainError(f"non-positive radicand {rad:g} at t={t:g}")
    L = math.sqrt(rad)
    return L, a0 / omega0 ** 2 * L + x0 * math.sinh(omega0 * t)


def constant_state(omega0, c, a0, x0, t=0.0):
    """Envelope state (with derivatives) of the constant-frequency closed form.

    Phases are set to zero; use it to seed :func:`integrate_envelope` with
    initial conditions matched to :func:`closed_form_constant`.
    """
    L, xc = closed_form_constant(omega0, c, a0, x0, t)
    Ldot = c * omega0 * omega0 * 2.0 * math.cosh(2.0 * omega0 * t) / L
    xcdot = a0 / omega0 ** 2 * Ldot + x0 * omega0 * math.cosh(omega0 * t)
    return EnvelopeState(t=t, L=L, Ldot=Ldot, xc=xc, xcdot=xcdot)


def breathing_omega_sq(eps, omega0, t):
    """Squared frequency giving the breathing envelope ``L = 1 + eps sin(omega0 t)``.

    Substituting that L into the L equation gives
    ``w2 = omega0**2 / L**4 - eps omega0**2 sin(omega0 t) / L``.
    """
    s = np.sin(omega0 * np.asarray(t, dtype=float))
    L = 1.0 + eps * s
    out = omega0 ** 2 / L ** 4 - eps * omega0 ** 2 * s / L
    return out if np.ndim(t) else float(out)


def envelope_residual(states, law, *, a0, omega0):
    """Max-norm residuals ``(rL, rx)`` of the envelope equations.

    Second derivatives come from centered differences on the sampled
    series, so the residual is O(dt**2) for an exact trajectory.
    """
    if len(states) < 5:
        raise GridError("need at least 5 states")
    t = np.array([s.t for s in states])
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12) or dt[0] == 0:
        raise GridError("states must lie on a uniform time grid")
    h = dt[0]
    L = np.array([s.L for s in states])
    xc = np.array([s.xc for s in states])
    w2 = np.asarray(law.omega_sq(t[1:-1]), dtype=float)
    Li = L[1:-1]
    Ldd = (L[2:] - 2 * Li + L[:-2]) / h ** 2
    xdd = (xc[2:] - 2 * xc[1:-1] + xc[:-2]) / h ** 2
    rL = np.max(np.abs(Ldd - w2 * Li + omega0 ** 2 / Li ** 3))
    rx = np.max(np.abs(xdd - w2 * xc[1:-1] + a0 / Li ** 3))
    return float(rL), float(rx)
