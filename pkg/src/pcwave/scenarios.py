"""Scenario configuration, built-in figure setups, the runner, and file writers.

Configuration files are INI-style text: one ``[section]`` per nested type
and ``key = value`` lines. Floats are written with ``repr`` so a
serialize -> parse -> serialize cycle is a fixed point.
"""
from dataclasses import dataclass, field
import configparser
import math
import os
import re

import numpy as np

from . import analysis
from .envelope import Breathing, Constant, EnvelopeState, Free, Tabulated, integrate_envelope
from .errors import BlowupError, ConfigError, PCWaveError
from .propagator import PotentialSpec, StepPlan, split_step_evolve
from .wavefield import (
    BranchParams,
    GridSpec,
    build_airy_reference,
    build_gaussian,
    build_psi,
    superpose,
    truncate,
)

__all__ = [
    "BRANCHES",
    "ScenarioConfig",
    "ScenarioResult",
    "make_plan",
    "builtin",
    "BUILTIN_NAMES",
    "parse_config",
    "load_config",
    "serialize_config",
    "apply_overrides",
    "initial_wave",
    "run_scenario",
    "write_density_image",
    "read_pgm",
    "write_trajectory_csv",
    "write_profile_csv",
]

BRANCHES = ("psi1", "psi2", "psi1_minus_psi2", "airy", "gaussian")
CSV_HEADER = "t,norm,mean_x,lobe_x,width,env_L,env_xc"


@dataclass
class ScenarioConfig:
    """Every free parameter of one run.

    ``wave_shift`` places the comoving origin of the exact wave (or the
    Gaussian center) in lab coordinates; the potential maximum sits at
    ``potential_center``. ``trunc_eps = 0`` disables truncation, which is
    only sensible for static profiles (``plan.n_steps = 0``).
    """

    name: str
    branch: str
    grid: GridSpec
    plan: StepPlan
    law: object = field(default_factory=Free)
    potential_center: float = 0.0
    a0: float = 1.0
    omega0: float = 1.0
    E: float = 0.0
    trunc_eps: float = 0.0
    trunc_center: float = 0.0
    wave_shift: float = 0.0
    gaussian_width: float = 10.0
    Ldot0: float = 0.0
    xcdot0: float = 0.0
    csv: bool = True
    image: bool = True

    def validate(self):
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be one of {', '.join(BRANCHES)}")
        if self.branch in ("psi1", "psi2", "psi1_minus_psi2") and not self.omega0 > 0:
            raise ConfigError("omega0 must be positive for parabolic cylinder branches")
        if self.trunc_eps < 0:
            raise ConfigError("trunc_eps must be non-negative")
        if self.branch == "gaussian" and not self.gaussian_width > 0:
            raise ConfigError("gaussian_width must be positive")
        if not self.grid.x_min <= self.potential_center <= self.grid.x_max:
            raise ConfigError("potential center must lie inside the grid")
        return self


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    snapshots: list
    record: analysis.TrajectoryRecord
    files: dict


def make_plan(dt, t_final, *, rows=200, absorber_width=0.1, absorber_strength=80.0):
    """Step plan with about `rows` snapshots between 0 and `t_final`."""
    n_steps = int(round(t_final / dt))
    return StepPlan(dt=dt, n_steps=n_steps, record_every=max(1, n_steps // rows),
                    absorber_width=absorber_width, absorber_strength=absorber_strength)


# Built-in figure setups. Time extents and grid windows are chosen for a
# visual match; they are not published values.
def _builtins():
    g2a = GridSpec(-30.0, 30.0, 2048)
    g2b = GridSpec(-40.0, 60.0, 2048)
    g3 = GridSpec(-8.0, 56.0, 2048)
    g1 = GridSpec(-10.0, 10.0, 1024)
    static = StepPlan(dt=1e-3, n_steps=0)
    p2a = make_plan(2.5e-4, 4.0)
    p2b = make_plan(5e-4, 8.0)
    p3 = make_plan(2.5e-4, 1.5)
    # Fig. 3: a0 = +5 is the sign for which psi2 decays into the barrier and
    # the self-acceleration points toward the potential maximum.
    fig3 = dict(branch="psi2", a0=5.0, omega0=0.6, potential_center=12.0,
                wave_shift=17.0, trunc_eps=0.1, trunc_center=17.0, grid=g3, plan=p3)
    return {
        "fig1a": ScenarioConfig("fig1a", "psi1", g1, static, a0=1.0, omega0=1.0, image=False),
        "fig1b": ScenarioConfig("fig1b", "psi2", g1, static, a0=1.0, omega0=1.0, image=False),
        "fig1c": ScenarioConfig("fig1c", "psi1", g1, static, a0=1.0, omega0=1.0, E=5.0,
                                image=False),
        "fig2a": ScenarioConfig("fig2a", "psi1_minus_psi2", g2a, p2a, a0=1.0, omega0=1.0,
                                trunc_eps=1 / 20),
        "fig2b": ScenarioConfig("fig2b", "psi2", g2b, p2b, a0=1.0, omega0=0.2,
                                trunc_eps=1 / 100),
        "fig2c": ScenarioConfig("fig2c", "airy", g2b, p2b),
        "fig3a": ScenarioConfig("fig3a", law=Constant(0.7), **fig3),
        "fig3b": ScenarioConfig("fig3b", law=Constant(0.1), **fig3),
        "fig3c": ScenarioConfig("fig3c", "gaussian", g3, p3, law=Constant(0.7),
                                potential_center=12.0, wave_shift=17.0, gaussian_width=10.0),
    }


BUILTIN_NAMES = tuple(_builtins())


def builtin(name):
    """Fresh copy of a built-in figure configuration."""
    table = _builtins()
    if name not in table:
        raise ConfigError(f"unknown built-in scenario {name!r}; choose from {', '.join(table)}")
    return table[name]


# ---------------------------------------------------------------- config text

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _law_items(law):
    if isinstance(law, Free):
        return [("kind", "free")]
    if isinstance(law, Constant):
        return [("kind", "constant"), ("omega_sq", _fmt(float(law.omega_sq_value)))]
    if isinstance(law, Breathing):
        return [("kind", "breathing"), ("eps", _fmt(float(law.eps))),
                ("omega0", _fmt(float(law.omega0)))]
    if isinstance(law, Tabulated):
        return [("kind", "tabulated"),
                ("times", ", ".join(_fmt(v) for v in law.times)),
                ("values", ", ".join(_fmt(v) for v in law.omega_sq_values))]
    raise ConfigError(f"cannot serialize law {law!r}")


_INT_KEYS = ("n", "n_steps", "record_every")

_KNOWN_KEYS = {
    "scenario": ("name", "branch", "a0", "omega0", "E", "wave_shift", "trunc_eps",
                 "trunc_center", "gaussian_width"),
    "envelope": ("Ldot0", "xcdot0"),
    "law": ("kind",),
    "potential": ("center",),
    "grid": ("x_min", "x_max", "n"),
    "plan": ("dt", "n_steps", "record_every", "absorber_width", "absorber_strength"),
    "outputs": ("csv", "image"),
}
_LAW_KEYS = {
    "constant": ("omega_sq",),
    "breathing": ("eps", "omega0"),
    "tabulated": ("times", "values"),
}


def serialize_config(cfg):
    """Config text for `cfg` (the inverse of :func:`parse_config`)."""
    sections = [
        ("scenario", [
            ("name", cfg.name), ("branch", cfg.branch), ("a0", cfg.a0),
            ("omega0", cfg.omega0), ("E", cfg.E), ("wave_shift", cfg.wave_shift),
            ("trunc_eps", cfg.trunc_eps), ("trunc_center", cfg.trunc_center),
            ("gaussian_width", cfg.gaussian_width),
        ]),
        ("envelope", [("Ldot0", cfg.Ldot0), ("xcdot0", cfg.xcdot0)]),
        ("law", _law_items(cfg.law)),
        ("potential", [("center", cfg.potential_center)]),
        ("grid", [("x_min", cfg.grid.x_min), ("x_max", cfg.grid.x_max), ("n", cfg.grid.n)]),
        ("plan", [
            ("dt", cfg.plan.dt), ("n_steps", cfg.plan.n_steps),
            ("record_every", cfg.plan.record_every),
            ("absorber_width", cfg.plan.absorber_width),
            ("absorber_strength", cfg.plan.absorber_strength),
        ]),
        ("outputs", [("csv", cfg.csv), ("image", cfg.image)]),
    ]
    lines = []
    for title, items in sections:
        lines.append(f"[{title}]")
        for key, value in items:
            if key in _INT_KEYS:
                value = int(value)
            elif isinstance(value, (int, float)) and not isinstance(value, bool):
                value = float(value)
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


_KEY_RE = re.compile(r"^\s*([^=:\s\[][^=:]*?)\s*[=:]")


def _line_map(text):
    where = {}
    section = None
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            where[(section, None)] = no
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            where[(section, m.group(1))] = no
    return where


class _Reader:
    def __init__(self, parser, lines, source):
        self.p = parser
        self.lines = lines
        self.source = source

    def error(self, section, key, msg):
        no = self.lines.get((section, key)) or self.lines.get((section, None))
        loc = f"{self.source}:{no}" if no else self.source
        return ConfigError(f"{loc}: [{section}] {key}: {msg}" if key else f"{loc}: [{section}] {msg}")

    def raw(self, section, key, default=None):
        if not self.p.has_section(section):
            if default is not None:
                return default
            raise ConfigError(f"{self.source}: missing section [{section}]")
        if not self.p.has_option(section, key):
            if default is not None:
                return default
            raise self.error(section, None, f"missing key {key!r}")
        return self.p.get(section, key)

    def num(self, section, key, default=None, kind=float):
        value = self.raw(section, key, None if default is None else str(default))
        try:
            out = kind(value)
        except ValueError:
            raise self.error(section, key, f"expected {kind.__name__}, got {value!r}") from None
        if kind is float and not math.isfinite(out):
            raise self.error(section, key, "must be finite")
        return out

    def flag(self, section, key, default):
        value = self.raw(section, key, "true" if default else "false").lower()
        if value not in ("true", "false", "yes", "no", "1", "0"):
            raise self.error(section, key, f"expected a boolean, got {value!r}")
        return value in ("true", "yes", "1")

    def floats(self, section, key):
        value = self.raw(section, key)
        try:
            return tuple(float(v) for v in value.split(","))
        except ValueError:
            raise self.error(section, key, "expected comma-separated numbers") from None


def parse_config(text, source="<config>"):
    """Parse config text into a validated :class:`ScenarioConfig`.

    Errors carry ``source:line`` locations.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    r = _Reader(parser, _line_map(text), source)
    kind = r.raw("law", "kind", "free").strip().lower()
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        known = _KNOWN_KEYS[section] + (_LAW_KEYS.get(kind, ()) if section == "law" else ())
        for key in parser.options(section):
            if key not in known:
                raise r.error(section, key, "unknown key")

    try:
        if kind == "free":
            law = Free()
        elif kind == "constant":
            law = Constant(r.num("law", "omega_sq"))
        elif kind == "breathing":
            law = Breathing(r.num("law", "eps"), r.num("law", "omega0"))
        elif kind == "tabulated":
            law = Tabulated(r.floats("law", "times"), r.floats("law", "values"))
        else:
            raise r.error("law", "kind", f"unknown law {kind!r}")
    except PCWaveError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise r.error("law", None, str(exc)) from None

    try:
        grid = GridSpec(r.num("grid", "x_min"), r.num("grid", "x_max"), r.num("grid", "n", kind=int))
    except PCWaveError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise r.error("grid", None, str(exc)) from None
    try:
        plan = StepPlan(
            dt=r.num("plan", "dt"),
            n_steps=r.num("plan", "n_steps", kind=int),
            record_every=r.num("plan", "record_every", 1, kind=int),
            absorber_width=r.num("plan", "absorber_width", 0.1),
            absorber_strength=r.num("plan", "absorber_strength", 80.0),
        )
    except PCWaveError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise r.error("plan", None, str(exc)) from None

    branch = r.raw("scenario", "branch").strip()
    if branch not in BRANCHES:
        raise r.error("scenario", "branch", f"must be one of {', '.join(BRANCHES)}")
    cfg = ScenarioConfig(
        name=r.raw("scenario", "name").strip(),
        branch=branch,
        grid=grid,
        plan=plan,
        law=law,
        potential_center=r.num("potential", "center", 0.0),
        a0=r.num("scenario", "a0", 1.0),
        omega0=r.num("scenario", "omega0", 1.0),
        E=r.num("scenario", "E", 0.0),
        trunc_eps=r.num("scenario", "trunc_eps", 0.0),
        trunc_center=r.num("scenario", "trunc_center", 0.0),
        wave_shift=r.num("scenario", "wave_shift", 0.0),
        gaussian_width=r.num("scenario", "gaussian_width", 10.0),
        Ldot0=r.num("envelope", "Ldot0", 0.0),
        xcdot0=r.num("envelope", "xcdot0", 0.0),
        csv=r.flag("outputs", "csv", True),
        image=r.flag("outputs", "image", True),
    )
    try:
        return cfg.validate()
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def apply_overrides(cfg, overrides):
    """Apply ``section.key=value`` overrides by round-tripping through the text form."""
    if not overrides:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(serialize_config(cfg))
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, option, value.strip())
    lines = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in parser.items(section))
        lines.append("")
    return parse_config("\n".join(lines), source="<overrides>")


# --------------------------------------------------------------------- runner

def _initial_envelope(cfg):
    return EnvelopeState(t=0.0, L=1.0, Ldot=cfg.Ldot0,
                         xc=cfg.wave_shift - cfg.potential_center, xcdot=cfg.xcdot0)


def initial_wave(cfg):
    """Initial (truncated, normalized) wave of a scenario."""
    grid = cfg.grid
    if cfg.branch == "airy":
        return build_airy_reference(grid)
    if cfg.branch == "gaussian":
        return build_gaussian(grid, cfg.wave_shift, cfg.gaussian_width)
    env = _initial_envelope(cfg)

    def one(n):
        w = build_psi(BranchParams(n, cfg.a0, cfg.omega0, cfg.E), env, grid,
                      center=cfg.potential_center)
        return truncate(w, cfg.trunc_eps, cfg.trunc_center) if cfg.trunc_eps > 0 else w

    if cfg.branch == "psi1":
        return one(1)
    if cfg.branch == "psi2":
        return one(2)
    diff = superpose(one(1), one(2), 1.0, -1.0)
    return diff.normalize() if cfg.trunc_eps > 0 else diff


def _envelope_track(cfg, times):
    """Envelope states at `times`, NaN-filled after a collapse."""
    env = _initial_envelope(cfg)
    L, xc = [env.L], [env.xc]
    for ta, tb in zip(times[:-1], times[1:]):
        if env is None:
            L.append(math.nan)
            xc.append(math.nan)
            continue
        try:
            env = integrate_envelope(cfg.law, env, [ta, tb], a0=cfg.a0,
                                     omega0=cfg.omega0, E=cfg.E)[-1]
            L.append(env.L)
            xc.append(env.xc + cfg.potential_center)
        except BlowupError:
            env = None
            L.append(math.nan)
            xc.append(math.nan)
    xc[0] = xc[0] + cfg.potential_center
    return L, xc


def run_scenario(cfg, out_dir=None):
    """Build, evolve and analyze one scenario; write requested files.

    Returns a :class:`ScenarioResult`. Static scenarios (``n_steps == 0``)
    produce a single snapshot and a peak-normalized intensity profile.
    """
    cfg.validate()
    psi0 = initial_wave(cfg)
    pot = PotentialSpec(cfg.law, cfg.potential_center)
    snapshots = split_step_evolve(psi0, pot, cfg.plan)
    edge = cfg.plan.absorber_width if cfg.plan.absorber_strength > 0 else 0.0
    rec = analysis.record_trajectory(snapshots, edge_fraction=edge, on_boundary="nan")
    if cfg.branch in ("psi1", "psi2", "psi1_minus_psi2"):
        rec.env_L, rec.env_xc = _envelope_track(cfg, rec.times)
    files = {}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if cfg.plan.n_steps == 0:
            path = os.path.join(out_dir, f"{cfg.name}_profile.csv")
            write_profile_csv(psi0, path)
            files["profile"] = path
        if cfg.csv:
            path = os.path.join(out_dir, f"{cfg.name}.csv")
            write_trajectory_csv(rec, path)
            files["csv"] = path
        if cfg.image and len(snapshots) >= 2:
            path = os.path.join(out_dir, f"{cfg.name}.pgm")
            write_density_image(snapshots, path)
            files["image"] = path
    return ScenarioResult(cfg, snapshots, rec, files)


# ---------------------------------------------------------------------- files

def write_density_image(snapshots, path):
    """16-bit binary PGM: one row per snapshot (first at top), |psi|^2 / global max."""
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots for a density image")
    rows = np.array([w.intensity for _, w in snapshots])
    peak = rows.max()
    scaled = np.zeros_like(rows) if peak == 0 else rows / peak
    pix = np.round(scaled * 65535.0).astype(">u2")
    h, w = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(pix.tobytes())
    return path


def read_pgm(path):
    """Read a binary PGM written by :func:`write_density_image`."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[3], dtype=dtype).reshape(h, w), maxval


def _cell(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def write_trajectory_csv(rec, path):
    """CSV with header ``t,norm,mean_x,lobe_x,width,env_L,env_xc``."""
    n = len(rec.times)
    cols = [rec.times, rec.norm, rec.mean_x, rec.lobe_x, rec.width,
            rec.env_L if rec.env_L is not None else [None] * n,
            rec.env_xc if rec.env_xc is not None else [None] * n]
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for i in range(n):
            fh.write(",".join(_cell(c[i]) for c in cols) + "\n")
    return path


def write_profile_csv(wave, path):
    """``x,intensity`` with the main peak scaled to one."""
    inten = wave.peak_normalized_intensity()
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("x,intensity\n")
        for x, v in zip(wave.x, inten):
            fh.write(f"{float(x)!r},{float(v)!r}\n")
    return path
