import math

import numpy as np
import pytest

from minienv import fock, master, states
from minienv.errors import IntegrationFailureError
from minienv.models import Model, ModelParams


def coherent_rho(alpha0, cutoff):
    return states.coherent_state(states.CoherentSpec(alpha0, cutoff))


class TestRhs:
    def test_thermal_state_is_stationary(self):
        nbar = 1.4
        cutoff = states.min_cutoff_for_thermal(nbar, 1e-13)
        cfg = master.LindbladConfig(gamma=0.7, nbar=nbar, cutoff=cutoff)
        rho = states.thermal_state(states.ThermalSpec(nbar, cutoff), tol=1e-10)
        rhs = master.lindblad_rhs(rho, cfg)
        assert np.abs(rhs.entries).max() <= 1e-10

    def test_vacuum_stationary_at_zero_temperature(self):
        cfg = master.LindbladConfig(gamma=1.0, nbar=0.0, cutoff=10)
        vac = np.zeros((11, 11), dtype=complex)
        vac[0, 0] = 1.0
        rhs = master.lindblad_rhs(fock.single_mode(vac), cfg)
        assert np.abs(rhs.entries).max() == 0.0

    def test_traceless_for_random_state(self):
        rng = np.random.default_rng(5)
        dim = 20
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = m @ m.conj().T
        rho = fock.single_mode(rho / np.trace(rho).real)
        cfg = master.LindbladConfig(gamma=1.0, nbar=0.7, cutoff=dim - 1)
        rhs = master.lindblad_rhs(rho, cfg)
        assert abs(np.trace(rhs.entries)) <= 1e-12 * dim
        assert rhs.hermiticity_defect() <= 1e-13

    def test_rejects_dimension_mismatch(self):
        cfg = master.LindbladConfig(gamma=1.0, nbar=0.0, cutoff=10)
        with pytest.raises(ValueError):
            master.lindblad_rhs(fock.identity(5), cfg)


class TestEvolve:
    def test_zero_temperature_purity_preserved(self):
        cutoff = 40
        cfg = master.LindbladConfig(gamma=1.0, nbar=0.0, cutoff=cutoff)
        snaps = master.evolve_master(coherent_rho(2.0, cutoff), cfg,
                                     np.linspace(0.0, 3.0, 30))
        for snap in snaps:
            assert abs(fock.purity(snap) - 1.0) <= 1e-7

    def test_entropy_matches_closed_form(self):
        cutoff = 40
        cfg = master.LindbladConfig(gamma=1.0, nbar=1.0, cutoff=cutoff)
        times = np.linspace(0.0, 3.0, 60)
        snaps = master.evolve_master(coherent_rho(2.0, cutoff), cfg, times)
        zeta = np.array([1.0 - fock.purity(s) for s in snaps])
        p = ModelParams(2.0, 1.0, 1.0, Model.MASTER)
        from minienv.models import master_linear_entropy

        assert np.abs(zeta - master_linear_entropy(times, p)).max() < 1e-5

    def test_amplitude_decay_law(self):
        cutoff = 40
        cfg = master.LindbladConfig(gamma=1.0, nbar=1.0, cutoff=cutoff)
        times = np.linspace(0.0, 2.0, 20)
        snaps = master.evolve_master(coherent_rho(2.0, cutoff), cfg, times)
        a = fock.annihilation(cutoff).entries
        for t, snap in zip(times, snaps):
            amp = np.trace(a @ snap.entries)
            assert abs(amp - 2.0 * math.exp(-t)) <= 1e-6

    def test_snapshots_stay_physical(self):
        cutoff = master.default_cutoff(1.5, 2.0)
        cfg = master.LindbladConfig(gamma=1.0, nbar=2.0, cutoff=cutoff)
        snaps = master.evolve_master(coherent_rho(1.5, cutoff), cfg,
                                     np.linspace(0.0, 2.0, 15))
        trace0 = fock.trace(snaps[0]).real
        for snap in snaps:
            assert snap.hermiticity_defect() <= 1e-9
            assert abs(fock.trace(snap).real - trace0) < 1e-8
            assert fock.min_eigenvalue(snap) >= -1e-8

    def test_oversized_step_detected(self):
        cfg = master.LindbladConfig(gamma=1.0, nbar=1.0, cutoff=40, step=0.05)
        with pytest.raises(IntegrationFailureError):
            master.evolve_master(coherent_rho(2.0, 40), cfg, np.linspace(0.0, 3.0, 10))

    def test_richardson_refine_passes_at_default_step(self):
        cutoff = master.default_cutoff(1.5, 1.0)
        cfg = master.LindbladConfig(gamma=1.0, nbar=1.0, cutoff=cutoff, refine=True)
        master.evolve_master(coherent_rho(1.5, cutoff), cfg, np.linspace(0.0, 2.0, 11))

    def test_free_rotation_leaves_purity(self):
        cutoff = master.default_cutoff(1.5, 1.0)
        times = np.linspace(0.0, 1.5, 10)
        base = master.evolve_master(
            coherent_rho(1.5, cutoff), master.LindbladConfig(1.0, 1.0, cutoff), times
        )
        rotated = master.evolve_master(
            coherent_rho(1.5, cutoff),
            master.LindbladConfig(1.0, 1.0, cutoff, omega=1.0),
            times,
        )
        for s, r in zip(base, rotated):
            assert abs(fock.purity(s) - fock.purity(r)) <= 1e-9

    def test_monotone_rise_to_plateau(self):
        cutoff = master.default_cutoff(1.5, 2.0)
        cfg = master.LindbladConfig(gamma=1.0, nbar=2.0, cutoff=cutoff)
        snaps = master.evolve_master(coherent_rho(1.5, cutoff), cfg,
                                     np.linspace(0.0, 2.5, 40))
        zeta = np.array([1.0 - fock.purity(s) for s in snaps])
        assert np.diff(zeta).min() >= -1e-8


class TestClosedFormState:
    def test_initial_state(self):
        p = ModelParams(2.0, 1.0, 1.0, Model.MASTER)
        rho = master.closed_form_master_state(0.0, p, 40)
        assert fock.trace_distance(rho, coherent_rho(2.0, 40)) <= 1e-10

    def test_matches_rk4_trajectory(self):
        cutoff = 40
        p = ModelParams(2.0, 1.0, 1.0, Model.MASTER)
        cfg = master.LindbladConfig(gamma=1.0, nbar=1.0, cutoff=cutoff)
        rho0 = coherent_rho(2.0, cutoff)
        for t in (0.1, 0.5, 1.0):
            snap = master.evolve_master(rho0, cfg, np.array([t]))[-1]
            ref = master.closed_form_master_state(t, p, cutoff)
            assert fock.trace_distance(snap, ref) < 1e-5

    def test_equilibrium_limit(self):
        # the residual displacement exp(-rate t) alpha0 dominates the distance;
        # at rate*t = 15 it has shrunk below the 1e-6 target
        p = ModelParams(2.0, 1.0, 1.0, Model.MASTER)
        rho = master.closed_form_master_state(15.0, p, 40)
        th = states.thermal_state(states.ThermalSpec(1.0, 40), tol=1e-10)
        assert fock.trace_distance(rho, th) < 1e-6


class TestDefaults:
    def test_default_cutoff_covers_transient_and_steady_state(self):
        assert master.default_cutoff(2.0, 1.0) >= 17
        assert master.default_cutoff(0.0, 25.0) >= states.min_cutoff_for_thermal(25.0, 1e-10)

    def test_resolved_step_respects_cap(self):
        cfg = master.LindbladConfig(gamma=2.0, nbar=1.0, cutoff=5)
        assert master.resolved_step(cfg) <= master.MAX_STEP / 2.0
        explicit = master.LindbladConfig(gamma=2.0, nbar=1.0, cutoff=5, step=0.01)
        assert master.resolved_step(explicit) == pytest.approx(0.005)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            master.LindbladConfig(gamma=0.0, nbar=1.0, cutoff=10)
        with pytest.raises(ValueError):
            master.LindbladConfig(gamma=1.0, nbar=-0.5, cutoff=10)
