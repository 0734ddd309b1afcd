import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from pcwave.envelope import (
    Breathing,
    Constant,
    EnvelopeState,
    Free,
    Tabulated,
    breathing_omega_sq,
    closed_form_constant,
    closed_form_free_L,
    constant_state,
    envelope_residual,
    integrate_envelope,
)
from pcwave.errors import BlowupError, DomainError, GridError
from pcwave.verify import pde_residual
from pcwave.wavefield import BranchParams, GridSpec

# closed form at omega0=1, c=0.1, t=0.5: sqrt(sqrt(0.96) + 0.2 sinh 1), 20 digits
CONSTANT_L_HALF = 1.1021960514545638358
# 1/1.1**4 - 0.1/1.1
BREATHING_QUARTER = 0.5921043644559797828


def test_free_law_constant_self_acceleration():
    out = integrate_envelope(Free(), EnvelopeState(), [0.0, 1.0], a0=1.0, omega0=0.0)
    assert abs(out[-1].xc + 0.5) < 1e-12
    assert abs(out[-1].L - 1.0) < 1e-12


def test_free_law_diffracting_scale():
    out = integrate_envelope(Free(), EnvelopeState(Ldot=1.0), [0.0, 1.0], a0=0.0, omega0=1.0)
    assert abs(out[-1].L - math.sqrt(3.0)) < 1e-9


def test_constant_law_nondiffracting():
    out = integrate_envelope(Constant(1.0), EnvelopeState(), np.linspace(0, 3, 31),
                             a0=0.0, omega0=1.0)
    assert max(abs(s.L - 1.0) for s in out) < 1e-9


def test_closed_form_free_examples():
    assert closed_form_free_L(0, 0, 7.3) == 1.0
    assert abs(closed_form_free_L(1, 0, 1) - math.sqrt(3)) < 1e-15
    assert abs(closed_form_free_L(0.2, 0, 4) - math.sqrt(2.6)) < 1e-15


def test_closed_form_constant_examples():
    assert closed_form_constant(1, 0, 0, 0, 2.5) == (1.0, 0.0)
    assert closed_form_constant(1, 0, 1, 0, 1.7) == (1.0, 1.0)
    L, xc = closed_form_constant(1, 0.1, 0, 0, 0.5)
    assert abs(L - CONSTANT_L_HALF) < 1e-15 and xc == 0.0


def test_closed_form_constant_matches_integration():
    init = constant_state(1.0, 0.1, 0.0, 0.0)
    out = integrate_envelope(Constant(1.0), init, [0.0, 0.5], a0=0.0, omega0=1.0)
    assert abs(out[-1].L - CONSTANT_L_HALF) < 1e-10


def test_constant_law_with_c_starts_off_unity():
    # L(0) = (1 - 4 c**2)**0.25, not 1, when c != 0
    assert abs(constant_state(1.0, 0.1, 0.0, 0.0).L - 0.96 ** 0.25) < 1e-15


@pytest.mark.parametrize("w0,w1", [(1.0, 0.0), (0.2, 0.0), (0.5, 0.3)])
def test_free_closed_form_agreement(w0, w1):
    ts = np.linspace(0, 3, 61)
    init = EnvelopeState(Ldot=math.hypot(w0, w1))
    out = integrate_envelope(Free(), init, ts, a0=0.0, omega0=w0)
    assert max(abs(s.L - closed_form_free_L(w0, w1, s.t)) for s in out) <= 1e-7


@pytest.mark.parametrize("c,a0,x0", [(0.0, 1.0, 0.0), (0.1, 1.0, 0.5), (0.3, -0.7, 0.3)])
def test_constant_closed_form_agreement(c, a0, x0):
    ts = np.linspace(0, 3, 61)
    out = integrate_envelope(Constant(1.0), constant_state(1.0, c, a0, x0), ts,
                             a0=a0, omega0=1.0)
    for s in out:
        L, xc = closed_form_constant(1.0, c, a0, x0, s.t)
        assert abs(s.L - L) <= 1e-7 and abs(s.xc - xc) <= 1e-7


def test_breathing_formula():
    assert breathing_omega_sq(0.0, 0.7, 1.3) == pytest.approx(0.49, abs=1e-15)
    assert abs(breathing_omega_sq(0.1, 1.0, math.pi / 2) - BREATHING_QUARTER) < 1e-15
    t = np.linspace(0, 5, 7)
    assert np.allclose(Breathing(0.1, 1.0).omega_sq(t), breathing_omega_sq(0.1, 1.0, t))


def test_breathing_self_consistency():
    eps, w0 = 0.1, 1.0
    ts = np.linspace(0, 2 * math.pi, 201)
    init = EnvelopeState(Ldot=eps * w0, xc=1.0, xcdot=eps * w0)
    out = integrate_envelope(Breathing(eps, w0), init, ts, a0=w0 ** 2, omega0=w0)
    for s in out:
        assert abs(s.L - (1 + eps * math.sin(w0 * s.t))) <= 1e-7
        assert abs(s.L - s.xc) <= 1e-7


def test_breathing_rejects_large_eps():
    with pytest.raises(DomainError):
        Breathing(1.0, 1.0)


def test_tabulated_interpolation_and_extension():
    law = Tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])
    assert law.omega_sq(0.5) == pytest.approx(0.5)
    assert law.omega_sq(1.5) == pytest.approx(0.75)
    assert law.omega_sq(-1.0) == 0.0 and law.omega_sq(9.0) == 0.5


def test_tabulated_matches_constant():
    ts = np.linspace(0, 2, 21)
    init = constant_state(1.0, 0.1, 1.0, 0.2)
    a = integrate_envelope(Tabulated([0.0, 5.0], [1.0, 1.0]), init, ts, a0=1.0, omega0=1.0)
    b = integrate_envelope(Constant(1.0), init, ts, a0=1.0, omega0=1.0)
    assert all(np.allclose(x.as_array(), y.as_array(), rtol=0, atol=1e-14) for x, y in zip(a, b))


@pytest.mark.parametrize("law", [Free(), Constant(0.7), Breathing(0.2, 0.8),
                                 Tabulated([0, 1, 2], [0.1, 0.9, 0.3])])
def test_substep_halving_converges(law):
    init = EnvelopeState(Ldot=1.0, xc=0.3, xcdot=-0.2)
    kw = dict(a0=0.8, omega0=0.8, E=0.5)
    a = integrate_envelope(law, init, [0.0, 2.0], max_substep=1e-2, **kw)[-1]
    b = integrate_envelope(law, init, [0.0, 2.0], max_substep=5e-3, **kw)[-1]
    assert abs(a.L - b.L) < 1e-8 * abs(b.L)
    assert abs(a.xc - b.xc) < 1e-8 * max(1.0, abs(b.xc))


def test_time_reversal():
    init = EnvelopeState(Ldot=0.2, xc=0.5, xcdot=0.1)
    kw = dict(a0=1.0, omega0=1.0, E=2.0)
    fwd = integrate_envelope(Constant(1.0), init, [0.0, 2.0], **kw)[-1]
    back = integrate_envelope(Constant(1.0), fwd, [2.0, 0.0], **kw)[-1]
    assert np.allclose(back.as_array(), init.as_array(), rtol=0, atol=1e-9)


def test_envelope_residual_examples():
    ts = np.arange(0, 2.0, 1e-3)
    exact = []
    for t in ts:
        L, xc = closed_form_constant(1.0, 0.1, 1.0, 0.0, t)
        exact.append(EnvelopeState(t=t, L=L, xc=xc))
    rL, rx = envelope_residual(exact, Constant(1.0), a0=1.0, omega0=1.0)
    assert rL <= 1e-5 and rx <= 1e-5

    rk = integrate_envelope(Free(), EnvelopeState(Ldot=0.3), ts, a0=1.0, omega0=0.5)
    assert max(envelope_residual(rk, Free(), a0=1.0, omega0=0.5)) <= 1e-5

    bad = [replace(s, L=1.01 * s.L) for s in exact]
    rL, _ = envelope_residual(bad, Constant(1.0), a0=1.0, omega0=1.0)
    assert rL > 1e-3


def test_collapse_and_bad_grids():
    with pytest.raises(BlowupError):
        integrate_envelope(Free(), EnvelopeState(), np.linspace(0, 6, 7), a0=0.0, omega0=0.2)
    with pytest.raises(GridError):
        integrate_envelope(Free(), EnvelopeState(), [0.0, 1.0, 0.5], a0=0.0, omega0=1.0)
    with pytest.raises(GridError):
        integrate_envelope(Free(), EnvelopeState(), [0.5, 1.0], a0=0.0, omega0=1.0)


def test_phase_rate_sign_is_what_the_pde_requires():
    # S' = xc'**2/2 + w2 xc**2/2 passes the PDE residual; flipping the sign of
    # the potential term leaves a residual of order one
    grid = GridSpec(-6.0, 6.0, 1024)
    law = Constant(1.0)
    init = constant_state(1.0, 0.1, 1.0, 0.0)
    params = BranchParams(2, 1.0, 1.0, 0.0)
    times = [0.0, 0.5, 1.0]
    good = pde_residual(params, law, init, times, grid)

    def flipped(st):
        # xc = L on this trajectory
        extra = quad(lambda s: closed_form_constant(1.0, 0.1, 1.0, 0.0, s)[1] ** 2, 0.0, st.t,
                     epsabs=1e-13, epsrel=1e-13)[0]
        return replace(st, S=st.S - extra)

    bad = pde_residual(params, law, init, times, grid, phase_fix=flipped)
    assert good <= 1e-4
    assert bad > 1e-2
