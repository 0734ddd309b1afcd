"""Diagnostics of wave trajectories: moments, main-lobe tracking, shape overlap."""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import BoundaryError, DegenerateError, GridError, GridMismatchError, MissingDataError

__all__ = [
    "TrajectoryRecord",
    "wave_norm",
    "expectation_x",
    "rms_width",
    "main_lobe_position",
    "lobe_pair",
    "record_trajectory",
    "second_difference",
    "ehrenfest_residual",
    "lobe_vs_envelope",
    "quadratic_acceleration",
    "shape_correlation",
    "shape_preservation_time",
    "sign_changes",
]


@dataclass
class TrajectoryRecord:
    times: list = field(default_factory=list)
    norm: list = field(default_factory=list)
    mean_x: list = field(default_factory=list)
    lobe_x: list = field(default_factory=list)
    width: list = field(default_factory=list)
    env_L: list = None
    env_xc: list = None

    def __post_init__(self):
        n = len(self.times)
        for name in ("norm", "mean_x", "lobe_x", "width", "env_L", "env_xc"):
            col = getattr(self, name)
            if col is not None and len(col) != n:
                raise GridError(f"column {name!r} has {len(col)} entries, expected {n}")

    def __len__(self):
        return len(self.times)


def wave_norm(wave):
    return float(np.sum(wave.intensity) * wave.grid.dx)


def expectation_x(wave):
    """``<x> = sum x |psi|^2 / sum |psi|^2``."""
    inten = wave.intensity
    total = float(np.sum(inten))
    if not total * wave.grid.dx > 1e-12:
        raise DegenerateError("wave norm vanishes")
    return float(np.dot(wave.x, inten) / total)


def rms_width(wave):
    inten = wave.intensity
    total = float(np.sum(inten))
    if not total * wave.grid.dx > 1e-12:
        raise DegenerateError("wave norm vanishes")
    mean = float(np.dot(wave.x, inten) / total)
    return math.sqrt(float(np.dot((wave.x - mean) ** 2, inten) / total))


def _refine(x, inten, j):
    # vertex of the parabola through the log-intensity at j-1, j, j+1
    if j == 0 or j == len(inten) - 1:
        return float(x[j])
    y0, y1, y2 = inten[j - 1], inten[j], inten[j + 1]
    if y0 <= 0 or y2 <= 0:
        return float(x[j])
    l0, l1, l2 = math.log(y0), math.log(y1), math.log(y2)
    denom = l0 - 2.0 * l1 + l2
    if denom >= 0:
        return float(x[j])
    dx = x[1] - x[0]
    return float(x[j] + 0.5 * dx * (l0 - l2) / denom)


def _local_maxima(inten):
    inner = (inten[1:-1] >= inten[:-2]) & (inten[1:-1] > inten[2:])
    return np.nonzero(inner)[0] + 1


def main_lobe_position(wave, *, previous=None, edge_fraction=0.0, tie_ratio=0.98,
                       window=None):
    """Position of the intensity maximum, refined by a log-parabola fit.

    Parameters
    ----------
    previous : float, optional
        Last known lobe position. Local maxima within `tie_ratio` of the
        global maximum count as ties; the one nearest `previous` wins.
    edge_fraction : float
        Width (fraction of the domain) of the absorbing edge zones; a
        maximum inside them raises :class:`BoundaryError`.
    window : (float, float), optional
        Restrict the search to ``window[0] <= x < window[1]``.
    """
    x = wave.x
    inten = wave.intensity
    if window is not None:
        inten = np.where((x >= window[0]) & (x < window[1]), inten, 0.0)
    j = int(np.argmax(inten))
    if previous is not None:
        cand = _local_maxima(inten)
        cand = cand[inten[cand] >= tie_ratio * inten[j]]
        if cand.size:
            j = int(cand[np.argmin(np.abs(x[cand] - previous))])
    pos = _refine(x, inten, j)
    zone = edge_fraction * wave.grid.length
    if zone > 0 and (pos < wave.grid.x_min + zone or pos > wave.grid.x_max - zone):
        raise BoundaryError(f"main lobe at x={pos:.4g} lies in the absorbing zone")
    return pos


def lobe_pair(wave, split):
    """Refined positions of the strongest maxima left and right of `split`."""
    left = main_lobe_position(wave, window=(-np.inf, split))
    right = main_lobe_position(wave, window=(split, np.inf))
    return left, right


def record_trajectory(snapshots, *, envelope=None, edge_fraction=0.0, track=True,
                      on_boundary="raise"):
    """Diagnostics for each ``(t, wave)`` snapshot.

    With ``on_boundary="nan"`` a lobe inside the absorbing zone is recorded
    as NaN instead of raising.

    The rms width is reported only while the norm exceeds half its initial
    value (NaN afterwards), since absorber losses make it meaningless.
    """
    rec = TrajectoryRecord()
    n0 = None
    prev = None
    for t, wave in snapshots:
        nrm = wave_norm(wave)
        if n0 is None:
            n0 = nrm
        try:
            lobe = main_lobe_position(wave, previous=prev if track else None,
                                      edge_fraction=edge_fraction)
            prev = lobe
        except BoundaryError:
            if on_boundary != "nan":
                raise
            lobe = math.nan
        rec.times.append(float(t))
        rec.norm.append(nrm)
        rec.mean_x.append(expectation_x(wave))
        rec.lobe_x.append(lobe)
        rec.width.append(rms_width(wave) if nrm > 0.5 * n0 else math.nan)
    if envelope is not None:
        rec.env_L = [s.L for s in envelope]
        rec.env_xc = [s.xc for s in envelope]
        rec.__post_init__()
    return rec


def _uniform_step(times, minimum=5):
    t = np.asarray(times, dtype=float)
    if t.size < minimum:
        raise GridError(f"need at least {minimum} samples")
    d = np.diff(t)
    if d[0] <= 0 or not np.allclose(d, d[0], rtol=1e-8, atol=1e-12):
        raise GridError("time grid must be uniform and increasing")
    return float(d[0])


def second_difference(times, values):
    """Centered second derivative at the interior samples."""
    h = _uniform_step(times, minimum=3)
    v = np.asarray(values, dtype=float)
    return (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)


def ehrenfest_residual(rec, law, center=0.0, *, observable="mean_x"):
    """Max over interior times of ``|d2<x>/dt2 - w2(t) (<x> - center)|``.

    Pass ``observable="lobe_x"`` to test the main-lobe trajectory against
    the same classical law.
    """
    t = np.asarray(rec.times, dtype=float)
    _uniform_step(t)
    v = np.asarray(getattr(rec, observable), dtype=float)
    acc = second_difference(t, v)
    w2 = np.asarray(law.omega_sq(t[1:-1]), dtype=float)
    return float(np.max(np.abs(acc - w2 * (v[1:-1] - center))))


def lobe_vs_envelope(rec, *, t_max=None):
    """Max deviation of the lobe track from ``x_c(t)`` plus its initial offset."""
    if rec.env_xc is None:
        raise MissingDataError("record has no envelope x_c column")
    t = np.asarray(rec.times)
    lobe = np.asarray(rec.lobe_x)
    xc = np.asarray(rec.env_xc)
    sel = t <= t_max if t_max is not None else np.ones(t.size, bool)
    dev = lobe - xc - (lobe[0] - xc[0])
    return float(np.max(np.abs(dev[sel])))


def quadratic_acceleration(times, values, t_max):
    """Acceleration from a least-squares quadratic fit over ``t <= t_max``."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = t <= t_max + 1e-12
    if sel.sum() < 3:
        raise GridError("need at least 3 samples in the fit window")
    c2 = np.polyfit(t[sel] - t[0], v[sel], 2)[0]
    return float(2.0 * c2)


def shape_correlation(wave, reference, shift=0.0):
    """Normalized overlap of ``|psi(x)|`` with ``|ref(x - shift)|``, in [0, 1]."""
    if wave.grid != reference.grid:
        raise GridMismatchError("waves live on different grids")
    x = wave.x
    a = np.abs(wave.amplitudes)
    b = np.interp(x - shift, x, np.abs(reference.amplitudes), left=0.0, right=0.0)
    den = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    if den == 0:
        raise DegenerateError("zero wave in shape correlation")
    return float(np.dot(a, b) / den)


def shape_preservation_time(snapshots, lobes=None, threshold=0.7):
    """First time the lobe-aligned shape correlation with t=0 drops below `threshold`.

    Returns ``(t_cross, correlations)``; ``t_cross`` is linearly interpolated
    between snapshots, or None when the threshold is never crossed.
    """
    if lobes is None:
        lobes = record_trajectory(snapshots).lobe_x
    ref = snapshots[0][1]
    corr = [shape_correlation(w, ref, lobes[i] - lobes[0]) for i, (_, w) in enumerate(snapshots)]
    times = [t for t, _ in snapshots]
    for i in range(1, len(corr)):
        if corr[i] < threshold:
            c0, c1 = corr[i - 1], corr[i]
            frac = (c0 - threshold) / (c0 - c1)
            return times[i - 1] + frac * (times[i] - times[i - 1]), corr
    return None, corr


def sign_changes(values, floor=0.0):
    """Number of sign changes in a sequence, ignoring entries with ``|v| <= floor``."""
    signs = [np.sign(v) for v in values if abs(v) > floor]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))
