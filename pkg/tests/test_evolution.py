import math

import numpy as np
import pytest

from dnls_lab import (
    Field,
    GaugeFrame,
    PreconditionError,
    SimConfig,
    energy_gauged,
    evolve,
    gauge_forward,
    gaussian_field,
    h1_bound,
    make_grid,
    make_multiplier,
    mass,
    momentum_gauged,
    nonlinearity,
    plane_wave_field,
    step,
)


def small_grid():
    return make_grid(math.pi, 64)


class TestNonlinearity:
    def test_zero_field(self, line_grid):
        z = Field(line_grid, np.zeros(line_grid.num_points), GaugeFrame.GAUGED)
        assert np.all(nonlinearity(z).samples == 0)

    def test_original_plane_wave(self):
        g = small_grid()
        A, k0 = 0.5 + 0.2j, 3.0
        u = plane_wave_field(g, A, k0)
        out = nonlinearity(u)
        expected = 1j * k0 * abs(A) ** 2 * u.samples
        assert np.max(np.abs(out.samples - expected)) < 1e-12

    def test_gauged_constant(self):
        g = small_grid()
        c = 0.8
        v = Field(g, np.full(g.num_points, c), GaugeFrame.GAUGED)
        out = nonlinearity(v)
        assert np.max(np.abs(out.samples - 0.1875j * c**5)) < 1e-13

    def test_dealiasing_truncates_input(self):
        g = small_grid()
        # content in the top third must not feed the products
        k_hi = g.num_points // 2 - 2
        u = plane_wave_field(g, 1.0, float(k_hi), frame=GaugeFrame.GAUGED)
        out = nonlinearity(u, dealias=True)
        assert np.max(np.abs(out.samples)) < 1e-13


class TestStep:
    def test_free_propagator_exact_phase(self):
        g = small_grid()
        k0 = 3.0
        u = plane_wave_field(g, 1.0, k0)
        cfg = SimConfig(dt=1e-2, t_end=1e-2, frame=GaugeFrame.ORIGINAL, linear_only=True)
        out = step(u, 1e-2, cfg)
        assert np.max(np.abs(out.samples - u.samples * np.exp(-1j * k0**2 * 1e-2))) < 1e-14

    def test_plane_wave_single_step(self):
        g = small_grid()
        A, k0 = 0.5, 2.0
        omega = k0**2 - A**2 * k0
        u = plane_wave_field(g, A, k0)
        cfg = SimConfig(dt=1e-3, t_end=1e-3, frame=GaugeFrame.ORIGINAL)
        out = step(u, 1e-3, cfg)
        exact = A * np.exp(1j * (k0 * g.nodes - omega * 1e-3))
        assert np.max(np.abs(out.samples - exact)) < 1e-13

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_fourth_order_on_nontrivial_datum(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))

        def run(dt):
            cfg = SimConfig(dt=dt, t_end=0.02, frame=GaugeFrame.GAUGED, record_stride=10**9)
            return evolve(v0, cfg).final_field.samples

        ref = run(1e-3 / 8)
        e_coarse = np.max(np.abs(run(2e-3) - ref))
        e_fine = np.max(np.abs(run(1e-3) - ref))
        # global error ratio ~ 2^4 for a fourth-order scheme
        assert 10.0 < e_coarse / e_fine < 25.0


class TestEvolve:
    def test_plane_wave_regression_short(self):
        g = small_grid()
        A, k0 = 0.5, 2.0
        omega = k0**2 - A**2 * k0
        cfg = SimConfig(dt=1e-3, t_end=0.1, frame=GaugeFrame.ORIGINAL, record_stride=100)
        traj = evolve(plane_wave_field(g, A, k0), cfg)
        exact = A * np.exp(1j * (k0 * g.nodes - omega * 0.1))
        assert np.max(np.abs(traj.final_field.samples - exact)) < 1e-10

    def test_free_evolution_mass_drift(self):
        g = make_grid(10 * math.pi, 256)
        f = gaussian_field(g, frame=GaugeFrame.GAUGED)
        cfg = SimConfig(
            dt=1e-3, t_end=10.0, frame=GaugeFrame.GAUGED, record_stride=1000, linear_only=True
        )
        traj = evolve(f, cfg)  # 10^4 unitary steps
        assert traj.abort_reason is None
        assert traj.diagnostics["mass_drift_rel"].max() < 1e-13

    def test_short_horizon_conservation(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))
        cfg = SimConfig(dt=1e-3, t_end=0.1, frame=GaugeFrame.GAUGED, record_stride=20)
        traj = evolve(v0, cfg)
        d = traj.diagnostics
        assert traj.abort_reason is None
        assert d["mass_drift_rel"].max() < 1e-10
        assert d["momentum_drift_rel"].max() < 1e-10
        assert d["energy_drift_rel"].max() < 1e-10
        assert abs(d["mass"][0] - mass(v0)) < 1e-12
        assert abs(d["momentum"][0] - momentum_gauged(v0)) < 1e-12
        assert abs(d["energy"][0] - energy_gauged(v0)) < 1e-12

    def test_time_reversibility(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))
        fwd = SimConfig(dt=1e-3, t_end=0.1, frame=GaugeFrame.GAUGED, record_stride=10**9)
        bwd = SimConfig(dt=-1e-3, t_end=0.1, frame=GaugeFrame.GAUGED, record_stride=10**9)
        there = evolve(v0, fwd).final_field
        back = evolve(there, bwd).final_field
        assert np.max(np.abs(back.samples - v0.samples)) < 1e-8

    def test_gauge_consistency_short(self, line_grid):
        u0 = gaussian_field(line_grid)
        v0 = gauge_forward(u0)
        dt, t_end = 1e-3, 0.1
        u1 = evolve(u0, SimConfig(dt=dt, t_end=t_end, frame=GaugeFrame.ORIGINAL, record_stride=10**9)).final_field
        v1 = evolve(v0, SimConfig(dt=dt, t_end=t_end, frame=GaugeFrame.GAUGED, record_stride=10**9)).final_field
        assert np.max(np.abs(gauge_forward(u1).samples - v1.samples)) < 1e-8

    def test_apriori_ceiling_along_run(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))
        cfg = SimConfig(dt=1e-3, t_end=0.2, frame=GaugeFrame.GAUGED, record_stride=20)
        traj = evolve(v0, cfg)
        d = traj.diagnostics
        for i in range(len(traj.times)):
            bound = h1_bound(math.sqrt(d["mass"][i]), d["momentum"][i], d["energy"][i])
            assert d["h1_seminorm"][i] ** 2 <= bound * (1 + 1e-6)

    def test_monitor_columns(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))
        m = make_multiplier(16.0, line_grid)
        cfg = SimConfig(dt=1e-3, t_end=0.05, frame=GaugeFrame.GAUGED, record_stride=10)
        traj = evolve(v0, cfg, monitor=m)
        d = traj.diagnostics
        assert np.all(np.isfinite(d["PI"]))
        assert np.all(np.isfinite(d["EI"]))
        # gaussian content is far below the cutoff, so the smoothed and plain
        # functionals agree to spectral-tail accuracy
        assert abs(d["PI"][0] - d["momentum"][0]) < 1e-6
        assert abs(d["EI"][0] - d["energy"][0]) < 1e-6
        plain = evolve(v0, cfg)
        assert np.all(np.isnan(plain.diagnostics["PI"]))

    def test_blowup_guard_trip(self):
        g = make_grid(10 * math.pi, 256)
        f = gaussian_field(g, amplitude=3.0, frame=GaugeFrame.GAUGED)
        cfg = SimConfig(dt=1e-3, t_end=0.5, frame=GaugeFrame.GAUGED, record_stride=5, max_amplitude=3.2)
        traj = evolve(f, cfg)
        assert traj.aborted
        assert "blowup guard" in traj.abort_reason
        assert len(traj.times) >= 1  # partial trajectory retained

    def test_drift_guard_trip(self, line_grid):
        v0 = gauge_forward(gaussian_field(line_grid))
        cfg = SimConfig(dt=1e-3, t_end=0.2, frame=GaugeFrame.GAUGED, record_stride=20, drift_tol=1e-16)
        traj = evolve(v0, cfg)
        assert traj.aborted
        assert "drift" in traj.abort_reason

    def test_frame_mismatch_rejected(self, line_grid):
        u0 = gaussian_field(line_grid)
        with pytest.raises(PreconditionError):
            evolve(u0, SimConfig(dt=1e-3, t_end=0.1, frame=GaugeFrame.GAUGED))

    def test_dt_warning_above_ceiling(self):
        g = make_grid(10 * math.pi, 1024)
        f = gaussian_field(g, frame=GaugeFrame.GAUGED)
        cfg = SimConfig(dt=5e-3, t_end=5e-3, frame=GaugeFrame.GAUGED)
        with pytest.warns(UserWarning, match="ceiling"):
            evolve(f, cfg)

    def test_config_validation(self):
        with pytest.raises(PreconditionError):
            SimConfig(dt=0.0, t_end=1.0)
        with pytest.raises(PreconditionError):
            SimConfig(dt=1e-3, t_end=1e-4)
        with pytest.raises(PreconditionError):
            SimConfig(dt=1e-3, t_end=1.0, record_stride=0)
