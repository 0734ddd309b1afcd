"""Self-accelerating parabolic cylinder waves in an inverted harmonic potential.

Submodules: :mod:`pcf` (special functions), :mod:`envelope` (scale and
trajectory ODEs), :mod:`wavefield` (exact and reference waves on a grid),
:mod:`propagator` (split-step solver), :mod:`analysis` (diagnostics),
:mod:`scenarios` (configs, runner, file output) and :mod:`verify`.
"""
from .envelope import Breathing, Constant, EnvelopeState, Free, Tabulated, integrate_envelope
from .errors import PCWaveError
from .propagator import PotentialSpec, StepPlan, split_step_evolve
from .scenarios import ScenarioConfig, builtin, load_config, run_scenario
from .wavefield import BranchParams, GridSpec, GridWave, build_psi, truncate

__version__ = "0.1.0"

__all__ = [
    "Breathing",
    "Constant",
    "EnvelopeState",
    "Free",
    "Tabulated",
    "integrate_envelope",
    "PCWaveError",
    "PotentialSpec",
    "StepPlan",
    "split_step_evolve",
    "ScenarioConfig",
    "builtin",
    "load_config",
    "run_scenario",
    "BranchParams",
    "GridSpec",
    "GridWave",
    "build_psi",
    "truncate",
]
