import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import optimize, special

from pcwave import analysis, pcf
from pcwave.envelope import Constant, EnvelopeState, constant_state
from pcwave.errors import DegenerateError, DomainError, GridError, GridMismatchError
from pcwave.verify import pde_residual
from pcwave.wavefield import (
    BranchParams,
    GridSpec,
    GridWave,
    build_airy_reference,
    build_gaussian,
    build_phi,
    build_psi,
    pcf_argument,
    pcf_order,
    superpose,
    truncate,
)

FIG1 = GridSpec(-10.0, 10.0, 1024)


def _airy_peak(decay):
    # scipy oracle for the maximum of |exp(decay x) Ai(2**(1/3) x)|
    f = lambda x: -(math.exp(decay * x) * special.airy(2 ** (1 / 3) * x)[0]) ** 2
    return optimize.minimize_scalar(f, bracket=(-1.2, -0.8, -0.4), tol=1e-14).x


def test_grid_validation_and_layout():
    g = GridSpec(-1.0, 1.0, 256)
    assert g.dx == 2.0 / 256 and g.x[0] == -1.0 and g.x[-1] == pytest.approx(1.0 - g.dx)
    for bad in [(-1.0, 1.0, 300), (-1.0, 1.0, 128), (1.0, 1.0, 256)]:
        with pytest.raises(GridError):
            GridSpec(*bad)


def test_grid_wave_invariants():
    g = GridSpec(-5.0, 5.0, 256)
    with pytest.raises(GridError):
        GridWave(g, np.ones(100))
    with pytest.raises(DegenerateError):
        GridWave(g, np.full(256, np.nan))
    w = GridWave(g, np.exp(-g.x ** 2) * 1e-200).normalize()
    assert abs(float(np.sum(w.intensity)) * g.dx - 1.0) < 1e-12
    with pytest.raises(ValueError):
        w.amplitudes[0] = 1.0


def test_orders():
    assert pcf_order(1, 1.0, 1.0, 0.0) == complex(-0.5, 0.5)
    assert pcf_order(2, 1.0, 1.0, 0.0) == complex(-0.5, -0.5)
    assert pcf_order(1, 1.0, 1.0, 5.0) == complex(-0.5, -4.5)
    assert pcf_order(2, 1.0, 0.2, 0.0) == pytest.approx(complex(-0.5, -62.5))


def test_branch_params_validation():
    with pytest.raises(DomainError):
        BranchParams(3, 1.0, 1.0)
    with pytest.raises(DomainError):
        BranchParams(1, 1.0, 0.0)


def test_phi_matches_series_near_origin():
    p = BranchParams(2, 1.0, 1.0, 0.0)
    xp = np.linspace(-3.0, 2.0, 11)
    z = pcf_argument(2, 1.0, 1.0, xp)
    ref = np.array([pcf.pcf_d(pcf_order(2, 1.0, 1.0), v) for v in z])
    assert np.max(np.abs(build_phi(p, xp) - ref) / np.abs(ref)) < 1e-8


@pytest.mark.parametrize("params", [BranchParams(2, 1.0, 1.0, 0.0), BranchParams(1, 1.0, 1.0, 5.0),
                                    BranchParams(2, 1.0, 0.2, 0.0)])
def test_phi_solves_comoving_equation(params):
    h = 1e-3
    xp = np.arange(-3.0, 3.0, h)
    phi = build_phi(params, xp)
    d2 = (-phi[4:] + 16 * phi[3:-1] - 30 * phi[2:-2] + 16 * phi[1:-3] - phi[:-4]) / (12 * h * h)
    x = xp[2:-2]
    w = params.omega0
    res = -0.5 * d2 - (w * w * x * x / 2 + params.a0 * x + params.E) * phi[2:-2]
    assert np.max(np.abs(res)) <= 1e-5 * np.max(np.abs(phi))


def _count_maxima(v):
    return int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])))


def test_branch_tails_on_opposite_sides():
    x = FIG1.x
    for n, tail_side in ((1, x < -2.0), (2, x > 2.0)):
        inten = build_psi(BranchParams(n, 1.0, 1.0), EnvelopeState(), FIG1).peak_normalized_intensity()
        quiet_side = (x > 2.0) if n == 1 else (x < -2.0)
        assert _count_maxima(inten[tail_side]) >= 3
        assert _count_maxima(inten[quiet_side]) == 0
        assert inten[quiet_side].max() < 0.05


def test_psi_at_rest_equals_phi():
    p = BranchParams(2, 1.0, 1.0)
    psi = build_psi(p, EnvelopeState(), FIG1)
    assert np.allclose(np.abs(psi.amplitudes), np.abs(build_phi(p, FIG1.x)), rtol=1e-14, atol=0)


def test_comoving_stationarity():
    p = BranchParams(1, 1.0, 1.0, 5.0)
    env = EnvelopeState(t=0.4, L=1.3, Ldot=0.2, xc=0.7, xcdot=-0.4, S=0.3, Theta=1.1)
    psi = build_psi(p, env, FIG1, center=0.5)
    ref = np.abs(build_phi(p, (FIG1.x - 0.5 - env.xc) / env.L)) / math.sqrt(env.L)
    assert np.max(np.abs(np.abs(psi.amplitudes) - ref) / ref.max()) < 1e-12


def test_psi_rejects_collapsed_envelope():
    with pytest.raises(DomainError):
        build_psi(BranchParams(1, 1.0, 1.0), EnvelopeState(L=0.0), FIG1)


def test_phase_rotated_wave_still_solves_pde():
    grid = GridSpec(-6.0, 6.0, 1024)
    rotate = lambda st: replace(st, S=st.S + 0.83)
    r = pde_residual(BranchParams(2, 1.0, 1.0), Constant(1.0), constant_state(1.0, 0.1, 1.0, 0.0),
                     [0.0, 0.6], grid, phase_fix=rotate)
    assert r <= 1e-4


@pytest.mark.parametrize("E", [0.0, 5.0])
def test_branches_independent(E):
    h = 1e-4
    x = np.array([-h, 0.0, h])
    p1 = build_phi(BranchParams(1, 1.0, 1.0, E), x)
    p2 = build_phi(BranchParams(2, 1.0, 1.0, E), x)
    d1, d2 = (p1[2] - p1[0]) / (2 * h), (p2[2] - p2[0]) / (2 * h)
    assert abs(p1[1] * d2 - p2[1] * d1) > 1e-6


def test_recessive_side_admixture_negligible():
    # D falls ~20 orders of magnitude left of the mirror point; marching
    # errors there stay far below the main lobe
    grid = GridSpec(-40.0, 60.0, 2048)
    amp = np.abs(build_psi(BranchParams(2, 1.0, 0.2), EnvelopeState(), grid).amplitudes)
    assert amp[grid.x < -25.0].max() < 1e-20 * amp.max()


def test_truncate_normalizes_and_is_idempotent():
    g = GridSpec(-40.0, 60.0, 2048)
    psi = build_psi(BranchParams(2, 1.0, 0.2), EnvelopeState(), g)
    once = truncate(psi, 0.01, 0.0)
    assert abs(once.norm() - 1.0) < 1e-12
    again = truncate(once, 0.0, 0.0)
    assert np.allclose(again.amplitudes, once.amplitudes, rtol=1e-13, atol=1e-16)


def test_truncate_large_eps_gives_gaussian():
    g = GridSpec(-10.0, 10.0, 1024)
    psi = build_psi(BranchParams(2, 1.0, 1.0), EnvelopeState(), g)
    t = truncate(psi, 10.0, 0.6)
    gauss = build_gaussian(g, 0.6, 0.1)
    assert analysis.shape_correlation(t, gauss) > 0.99


def test_truncate_errors():
    g = GridSpec(-10.0, 10.0, 256)
    w = GridWave(g, np.exp(-50 * (g.x + 8) ** 2))
    with pytest.raises(DomainError):
        truncate(w, -1.0)
    with pytest.raises(DegenerateError):
        truncate(w, 100.0, 8.0)


def test_superpose_examples():
    g = GridSpec(-5.0, 5.0, 256)
    w = build_gaussian(g, 0.0, 1.0)
    assert np.all(superpose(w, w, 1, -1).amplitudes == 0)
    zero = GridWave(g, np.zeros(256))
    assert np.array_equal(superpose(w, zero, 2, 1).amplitudes, 2 * w.amplitudes)
    with pytest.raises(GridMismatchError):
        superpose(w, build_gaussian(GridSpec(-5.0, 5.0, 512), 0.0, 1.0))


def test_fig2a_prefactor_profile_is_difference_of_branches():
    p1, p2 = BranchParams(1, 1.0, 1.0), BranchParams(2, 1.0, 1.0)
    d = superpose(build_psi(p1, EnvelopeState(), FIG1), build_psi(p2, EnvelopeState(), FIG1), 1, -1)
    x = FIG1.x
    ref = build_phi(p1, x) - build_phi(p2, x)
    assert np.allclose(d.amplitudes, ref, rtol=1e-13, atol=0)


def test_airy_reference_lobe_and_tails():
    g = GridSpec(-40.0, 60.0, 2048)
    w = build_airy_reference(g)
    assert abs(w.norm() - 1.0) < 1e-12
    assert abs(analysis.main_lobe_position(w) - _airy_peak(0.1)) < g.dx / 10
    undamped = build_airy_reference(g, decay=0.0)
    assert abs(analysis.main_lobe_position(undamped) - (-1.018792971647471 / 2 ** (1 / 3))) < g.dx / 10
    inten = w.intensity
    x = g.x
    right = inten[(x > 1.0) & (x < 8.0)]
    assert np.all(np.diff(right) < 0)
    assert _count_maxima(inten[(x < -2.0) & (x > -30.0)]) >= 10


def test_gaussian_reference():
    g = GridSpec(-8.0, 56.0, 2048)
    w = build_gaussian(g, 17.0, 10.0)
    assert abs(analysis.expectation_x(w) - 17.0) < 1e-10
    assert abs(w.amplitudes[np.argmin(np.abs(g.x - 19.0))] / w.amplitudes.max()
               - math.exp(-0.4)) < 1e-12
    with pytest.raises(DomainError):
        build_gaussian(g, 17.0, 0.0)
