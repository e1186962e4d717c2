"""Solver oracles: GRF statistics, stream-function inversion, single-mode
decay, forcing Taylor check, conservation and determinism properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import fft as sfft

from kolmoflow.errors import BlowupError, ConfigError, StepSizeError
from kolmoflow.grid import Grid2D
from kolmoflow.solver import (
    GRFSpec,
    SolverConfig,
    VorticitySnapshot,
    _simulate_stack,
    downsample,
    downsample_field,
    sample_initial_vorticity,
    simulate,
    step,
    velocity_from_vorticity,
)


def _snapshot(grid, omega):
    return VorticitySnapshot(grid=grid, omega=omega, time=0.0)


class TestGRF:
    def test_mean_mode_zeroed_exactly(self):
        grid = Grid2D(64, 64)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=0)
        assert abs(snap.omega.mean()) < 1e-14

    def test_deterministic_given_seed(self):
        grid = Grid2D(32, 32)
        a = sample_initial_vorticity(GRFSpec(), grid, seed=7)
        b = sample_initial_vorticity(GRFSpec(), grid, seed=7)
        assert np.array_equal(a.omega, b.omega)
        c = sample_initial_vorticity(GRFSpec(), grid, seed=8)
        assert not np.array_equal(a.omega, c.omega)

    def test_covariance_spectrum_ratio(self):
        # Var at |k|^2=1 over Var at |k|^2=4 must be ((1+196)/(4+196))^exponent.
        grid = Grid2D(32, 32)
        spec = GRFSpec()
        n = 10_000
        c1 = np.zeros(n)
        c4 = np.zeros(n)
        for i in range(n):
            omega = sample_initial_vorticity(spec, grid, seed=1000 + i).omega
            hat = np.fft.rfft2(omega) / (32 * 32)
            # average the independent modes in each shell
            c1[i] = abs(hat[1, 0]) ** 2 + abs(hat[0, 1]) ** 2 + abs(hat[-1, 0]) ** 2
            c4[i] = abs(hat[2, 0]) ** 2 + abs(hat[0, 2]) ** 2 + abs(hat[-2, 0]) ** 2
        ratio = c1.mean() / c4.mean()
        expected = ((1.0 + spec.shift) / (4.0 + spec.shift)) ** spec.exponent
        assert ratio == pytest.approx(expected, rel=0.05)

    def test_invalid_spec_rejected(self):
        with pytest.raises(ConfigError):
            GRFSpec(exponent=0.5)
        with pytest.raises(ConfigError):
            GRFSpec(shift=-1.0)


class TestVelocityRecovery:
    def test_shear_mode_analytic(self):
        # w = sin(y): psi = sin(y) solves lap(psi) = -w, so u = cos(y), v = 0.
        grid = Grid2D(64, 64)
        _, y = grid.coords()
        u, v = velocity_from_vorticity(_snapshot(grid, np.sin(y)))
        assert np.max(np.abs(u - np.cos(y))) < 1e-12
        assert np.max(np.abs(v)) < 1e-12

    def test_zero_field(self):
        grid = Grid2D(32, 32)
        u, v = velocity_from_vorticity(_snapshot(grid, np.zeros((32, 32))))
        assert np.max(np.abs(u)) == 0.0
        assert np.max(np.abs(v)) == 0.0

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_spectral_divergence_vanishes(self, seed):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=seed)
        u, v = velocity_from_vorticity(snap)
        kx = grid.kx[:, None]
        kyr = np.arange(grid.ny // 2 + 1)[None, :]
        div_hat = 1j * kx * sfft.rfft2(u) + 1j * kyr * sfft.rfft2(v)
        assert np.max(np.abs(div_hat)) / (grid.nx * grid.ny) < 1e-12


class TestStep:
    def test_single_mode_viscous_decay(self):
        # advection of sin(x) by its own velocity vanishes identically,
        # leaving the exact integrating-factor heat decay.
        grid = Grid2D(64, 64)
        x, _ = grid.coords()
        cfg = SolverConfig(nu=0.01, chi=0.0, dt=1e-3, t_final=1.0, record_interval=1.0)
        traj = simulate(_snapshot(grid, np.sin(x)), cfg)
        final = traj.snapshots[-1].omega
        amp = final[:, 0].max()
        assert amp == pytest.approx(np.exp(-0.01 * 1.0), rel=1e-8)

    def test_zero_stays_zero_unforced(self):
        grid = Grid2D(32, 32)
        cfg = SolverConfig(nu=1e-3, chi=0.0, dt=1e-2, t_final=0.1, record_interval=0.1)
        traj = simulate(_snapshot(grid, np.zeros((32, 32))), cfg)
        assert np.max(np.abs(traj.snapshots[-1].omega)) == 0.0

    def test_forcing_first_order_taylor(self):
        # from rest, one step of size dt gives dt*f + O(dt^2); halving dt
        # must shrink the defect ~4x.
        grid = Grid2D(32, 32)
        x, y = grid.coords()
        f = 0.1 * (np.sin(x + y) + np.cos(x + y))

        def defect(dt):
            cfg = SolverConfig(nu=1e-3, chi=0.1, dt=dt, t_final=dt, record_interval=dt)
            out = step(_snapshot(grid, np.zeros((32, 32))), cfg)
            return np.max(np.abs(out.omega - dt * f))

        d1, d2 = defect(2e-2), defect(1e-2)
        assert d1 < 1e-4
        assert d1 / d2 == pytest.approx(4.0, rel=0.3)

    def test_cfl_violation_raises_with_admissible_dt(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(amplitude=200.0), grid, seed=3)
        cfg = SolverConfig(nu=1e-3, chi=0.1, dt=0.5, t_final=0.5, record_interval=0.5)
        with pytest.raises(StepSizeError) as err:
            step(snap, cfg)
        assert 0 < err.value.admissible_dt < 0.5

    def test_blowup_reports_time(self):
        grid = Grid2D(32, 32)
        bad = np.zeros((32, 32))
        bad[0, 0] = np.nan
        cfg = SolverConfig(nu=1e-3, chi=0.0, dt=0.1, t_final=0.1, record_interval=0.1)
        with pytest.raises(BlowupError) as err:
            _simulate_stack(bad, grid, cfg)
        assert err.value.time == pytest.approx(0.1)


class TestSimulate:
    def test_zero_horizon_returns_initial_only(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=1)
        traj = simulate(snap, SolverConfig(dt=1e-2, t_final=0.0))
        assert len(traj.snapshots) == 1
        assert np.array_equal(traj.snapshots[0].omega, snap.omega)

    def test_record_interval_equals_horizon(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=1)
        cfg = SolverConfig(dt=1e-2, t_final=0.5, record_interval=0.5)
        traj = simulate(snap, cfg)
        assert len(traj.snapshots) == 2
        assert traj.snapshots[1].time == pytest.approx(0.5)

    def test_mean_conserved_under_forcing(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=11)
        cfg = SolverConfig(nu=1e-3, chi=0.1, dt=1e-2, t_final=2.0, record_interval=0.5)
        traj = simulate(snap, cfg)
        for s in traj.snapshots:
            assert abs(s.omega.mean()) <= 1e-10

    def test_unforced_energy_nonincreasing(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=5)
        cfg = SolverConfig(nu=1e-3, chi=0.0, dt=5e-3, t_final=1.0, record_interval=0.05)
        traj = simulate(snap, cfg)
        energies = [np.mean(s.omega**2) for s in traj.snapshots]
        assert all(e1 <= e0 * (1 + 1e-12) for e0, e1 in zip(energies, energies[1:]))

    def test_deterministic(self):
        grid = Grid2D(32, 32)
        cfg = SolverConfig(nu=1e-3, chi=0.1, dt=1e-2, t_final=0.5, record_interval=0.25)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=9)
        t1 = simulate(snap, cfg)
        t2 = simulate(snap, cfg)
        for a, b in zip(t1.snapshots, t2.snapshots):
            assert np.array_equal(a.omega, b.omega)


class TestDownsample:
    def test_identity_factor(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=2)
        out = downsample(snap, 1)
        assert np.array_equal(out.omega, snap.omega)

    def test_low_mode_survives(self):
        grid = Grid2D(128, 128)
        x, _ = grid.coords()
        out = downsample(_snapshot(grid, np.sin(x)), 2)
        coarse = Grid2D(64, 64)
        xc, _ = coarse.coords()
        assert np.max(np.abs(out.omega - np.sin(xc))) < 1e-12

    def test_high_mode_removed(self):
        grid = Grid2D(64, 64)
        x, _ = grid.coords()
        out = downsample(_snapshot(grid, np.sin(31 * x)), 4)
        assert out.grid.nx == 16
        assert np.max(np.abs(out.omega)) < 1e-12

    def test_composition(self):
        grid = Grid2D(64, 64)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=4)
        two_step = downsample(downsample(snap, 2), 2)
        direct = downsample(snap, 4)
        assert np.max(np.abs(two_step.omega - direct.omega)) < 1e-12

    def test_mean_preserved_exactly(self):
        grid = Grid2D(64, 64)
        omega = sample_initial_vorticity(GRFSpec(), grid, seed=6).omega + 3.25
        out = downsample_field(omega, 2)
        assert out.mean() == pytest.approx(omega.mean(), abs=1e-13)

    def test_nondivisible_factor_rejected(self):
        grid = Grid2D(32, 32)
        snap = sample_initial_vorticity(GRFSpec(), grid, seed=2)
        with pytest.raises(ConfigError):
            downsample(snap, 3)


class TestGridValidation:
    @pytest.mark.parametrize("bad", [4, 6, 24, 100])
    def test_rejects_non_pow2(self, bad):
        with pytest.raises(ConfigError):
            Grid2D(bad, bad)

    def test_wavenumber_ordering(self):
        grid = Grid2D(8, 8)
        assert grid.kx[0] == 0
        assert set(grid.kx.tolist()) == {0, 1, 2, 3, -4, -3, -2, -1}
