import math

import numpy as np
import pytest

from pcwave import analysis
from pcwave.analysis import TrajectoryRecord
from pcwave.envelope import Constant, Free, closed_form_constant, constant_state, integrate_envelope
from pcwave.errors import BoundaryError, DegenerateError, GridError, GridMismatchError, MissingDataError
from pcwave.scenarios import builtin, initial_wave
from pcwave.wavefield import BranchParams, GridSpec, GridWave, build_gaussian, build_psi

# <x> of the truncated fig2b wave at t=0, quadrature on the same window at n=4096
FIG2B_MEAN_X0 = 2.330839761129

G3 = GridSpec(-8.0, 56.0, 2048)


def test_expectation_examples():
    assert abs(analysis.expectation_x(build_gaussian(G3, 17.0, 10.0)) - 17.0) < 1e-10
    g = GridSpec(-10.0, 10.0, 512)
    odd = GridWave(g, np.where(np.abs(g.x) < 9.9, g.x * np.exp(-g.x ** 2), 0.0))
    # odd about 0 except for the unmatched first sample
    assert abs(analysis.expectation_x(odd)) < 1e-12
    assert abs(analysis.expectation_x(initial_wave(builtin("fig2b"))) - FIG2B_MEAN_X0) < 1e-8


def test_expectation_translation_covariant():
    w = build_gaussian(G3, 20.0, 3.0)
    for shift in (1, 7, -40):
        moved = GridWave(G3, np.roll(w.amplitudes, shift))
        assert abs(analysis.expectation_x(moved) - analysis.expectation_x(w) - shift * G3.dx) < 1e-12


def test_degenerate_moments():
    zero = GridWave(G3, np.zeros(G3.n))
    with pytest.raises(DegenerateError):
        analysis.expectation_x(zero)
    with pytest.raises(DegenerateError):
        analysis.rms_width(zero)


def test_rms_width_of_gaussian():
    # exp(-(x-c)**2 / p) has |psi|**2 variance p/4
    assert abs(analysis.rms_width(build_gaussian(G3, 20.0, 4.0)) - 1.0) < 1e-10


def test_main_lobe_examples():
    assert abs(analysis.main_lobe_position(build_gaussian(G3, 17.0, 10.0)) - 17.0) < G3.dx / 10
    g = GridSpec(0.0, 256.0, 256)
    amp = np.zeros(256)
    amp[1:4] = np.sqrt([1.0, 4.0, 1.0])
    assert analysis.main_lobe_position(GridWave(g, amp)) == 2.0


def test_main_lobe_invariant_under_phase_and_scale():
    w = initial_wave(builtin("fig2b"))
    ref = analysis.main_lobe_position(w)
    assert abs(analysis.main_lobe_position(w.scaled(3.7 * np.exp(1.2j))) - ref) < 1e-12


def test_main_lobe_tracking_and_boundary():
    g = GridSpec(0.0, 100.0, 1024)
    two = GridWave(g, np.exp(-(g.x - 30) ** 2) + 0.995 * np.exp(-(g.x - 60) ** 2))
    assert abs(analysis.main_lobe_position(two) - 30.0) < 0.01
    assert abs(analysis.main_lobe_position(two, previous=58.0) - 60.0) < 0.01
    assert abs(analysis.main_lobe_position(two, previous=58.0, tie_ratio=0.995) - 30.0) < 0.01
    edge = GridWave(g, np.exp(-(g.x - 95) ** 2))
    with pytest.raises(BoundaryError):
        analysis.main_lobe_position(edge, edge_fraction=0.1)
    left, right = analysis.lobe_pair(two, 45.0)
    assert abs(left - 30) < 0.01 and abs(right - 60) < 0.01


def test_record_length_invariant():
    with pytest.raises(GridError):
        TrajectoryRecord(times=[0, 1], norm=[1, 1], mean_x=[0], lobe_x=[0, 0], width=[1, 1])


def test_record_trajectory_columns_and_width_gate():
    g = GridSpec(0.0, 100.0, 1024)
    w = build_gaussian(g, 50.0, 4.0)
    snaps = [(0.0, w), (0.5, w.scaled(0.8)), (1.0, w.scaled(0.6))]
    rec = analysis.record_trajectory(snaps)
    assert rec.times == [0.0, 0.5, 1.0]
    assert all(0 < n <= 1.01 for n in rec.norm)
    assert not math.isnan(rec.width[1]) and math.isnan(rec.width[2])
    edge = [(0.0, GridWave(g, np.exp(-(g.x - 97) ** 2)))]
    assert math.isnan(analysis.record_trajectory(edge, edge_fraction=0.1, on_boundary="nan").lobe_x[0])
    with pytest.raises(BoundaryError):
        analysis.record_trajectory(edge, edge_fraction=0.1)


def test_difference_helpers():
    t = np.linspace(0, 1, 11)
    assert np.allclose(analysis.second_difference(t, 3 * t ** 2 + t), 6.0)
    assert analysis.quadratic_acceleration(t, -0.5 * t ** 2 + 2, 0.6) == pytest.approx(-1.0)
    with pytest.raises(GridError):
        analysis.second_difference([0, 0.1, 0.3, 0.4, 0.5], np.zeros(5))
    assert analysis.sign_changes([1, 0.01, -0.01, 1, -2], floor=0.05) == 1
    assert analysis.sign_changes([1, -1, 1]) == 2


def test_lobe_vs_envelope_analytic_trajectory():
    # untruncated wave advanced along its envelope: lobe rides x_c exactly
    grid = GridSpec(-10.0, 14.0, 1024)
    params = BranchParams(2, 1.0, 1.0)
    times = np.linspace(0, 1.5, 16)
    states = integrate_envelope(Constant(1.0), constant_state(1.0, 0.0, 1.0, 0.5), times,
                                a0=1.0, omega0=1.0)
    snaps = [(s.t, build_psi(params, s, grid)) for s in states]
    rec = analysis.record_trajectory(snaps, envelope=states)
    assert rec.env_xc[-1] == pytest.approx(closed_form_constant(1.0, 0.0, 1.0, 0.5, 1.5)[1])
    assert analysis.lobe_vs_envelope(rec) <= grid.dx


def test_lobe_vs_envelope_needs_envelope():
    with pytest.raises(MissingDataError):
        analysis.lobe_vs_envelope(TrajectoryRecord([0.0], [1.0], [0.0], [0.0], [1.0]))


def test_lobe_vs_envelope_fig2b_window(session):
    res = session.run("fig2b")
    window, _ = analysis.shape_preservation_time(res.snapshots, res.record.lobe_x, 0.7)
    dx = res.config.grid.dx
    assert analysis.lobe_vs_envelope(res.record, t_max=window) <= 2 * dx * 10


def test_lobe_follows_envelope_before_focusing(session):
    # the ideal envelope focuses (L -> 0) at t = 1/omega0 = 5; well before
    # that the truncated lobe follows x_c closely
    res = session.run("fig2b")
    assert analysis.lobe_vs_envelope(res.record, t_max=3.0) <= 0.25


def test_lobe_violates_ehrenfest_while_mean_obeys(session):
    rec = session.run("fig2b").record
    n = int(np.searchsorted(rec.times, 1.0 + 1e-9))
    head = TrajectoryRecord(rec.times[:n], rec.norm[:n], rec.mean_x[:n], rec.lobe_x[:n], rec.width[:n])
    mean_res = analysis.ehrenfest_residual(head, Free())
    lobe_res = analysis.ehrenfest_residual(head, Free(), observable="lobe_x")
    assert mean_res <= 1e-6
    assert lobe_res > 0.5 and lobe_res > 1e4 * mean_res


def test_shape_correlation_examples():
    g = GridSpec(-20.0, 20.0, 1024)
    w = build_gaussian(g, 0.0, 3.0)
    assert analysis.shape_correlation(w, w) == pytest.approx(1.0, abs=1e-15)
    moved = GridWave(g, np.roll(w.amplitudes, 1))
    assert abs(analysis.shape_correlation(moved, w, g.dx) - 1.0) < 1e-6
    assert analysis.shape_correlation(moved, w, 5.0) < 0.1
    with pytest.raises(GridMismatchError):
        analysis.shape_correlation(w, build_gaussian(GridSpec(-20.0, 20.0, 512), 0.0, 3.0))
    with pytest.raises(DegenerateError):
        analysis.shape_correlation(w, GridWave(g, np.zeros(1024)))


def test_shape_preservation_time():
    g = GridSpec(-20.0, 20.0, 1024)
    snaps = [(float(t), build_gaussian(g, 0.0, 3.0 * (1 + t))) for t in range(6)]
    t_cross, corr = analysis.shape_preservation_time(snaps, threshold=0.9)
    assert corr[0] == pytest.approx(1.0) and all(np.diff(corr) < 0)
    i = next(k for k, c in enumerate(corr) if c < 0.9)
    assert i - 1 < t_cross <= i
    assert analysis.shape_preservation_time(snaps[:1] * 3, threshold=0.9)[0] is None
