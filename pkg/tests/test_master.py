import math

import numpy as np
import pytest

from oracles import two_level_steady_state
from vicprobe.errors import SingularSystem, StepSizeUnderflow
from vicprobe.master import (
    MasterRHS,
    Mode,
    default_dt_hint,
    integrate,
    rhs,
    steady_state_pump_only,
)
from vicprobe.model import DensityMatrix, make_params
from vicprobe.stepper import integrate_adaptive


def params(**over):
    raw = dict(gamma1=1.0, gamma2=1.0, theta_deg=15.0, eta0=1.0, big_g=10.0,
               small_g=0.01, w12=-10.0, delta2=0.0, delta1=0.0)
    raw.update(over)
    return make_params(raw)


def random_hermitian_state(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m = m @ m.conj().T
    return DensityMatrix(m / m.trace())


class TestRHS:
    def test_ground_state_stationary_without_fields(self):
        for eta0 in (0.0, 1.0):
            r = MasterRHS(params(big_g=0.0, small_g=0.0, eta0=eta0))
            d = rhs(0.7, DensityMatrix.ground_state(), r)
            assert np.max(np.abs(d)) == 0.0

    def test_two_level_reduction_population_decay(self):
        # with the interference off and no probe, level 1 only decays
        r = MasterRHS(params(eta0=0.0, small_g=0.0, big_g=3.0))
        rho = DensityMatrix.from_populations(0.4, 0.0, 0.6)
        d = rhs(0.0, rho, r)
        assert d[0, 0] == pytest.approx(-2 * 1.0 * 0.4, abs=1e-14)

    def test_interference_seeds_excited_coherence(self):
        # population in |1> alone sources d(rho12)/dt = -eta
        p = params(eta0=1.0, theta_deg=15.0, big_g=0.0, small_g=0.0)
        r = MasterRHS(p)
        d = rhs(0.0, DensityMatrix.from_populations(1.0, 0.0, 0.0), r)
        assert d[0, 1] == pytest.approx(-math.cos(math.radians(15.0)), abs=1e-12)
        assert d[0, 1] == pytest.approx(-p.eta, abs=1e-15)

    @pytest.mark.parametrize("mode", [Mode.DRIVEN, Mode.FIELD_FREE])
    def test_trace_conservation_of_derivative(self, mode):
        rng = np.random.default_rng(11)
        for _ in range(25):
            p = params(
                gamma1=rng.uniform(0.2, 3), gamma2=rng.uniform(0.2, 3),
                theta_deg=rng.uniform(0, 90), eta0=float(rng.integers(0, 2)),
                big_g=rng.uniform(0, 10), small_g=rng.uniform(0, 0.5),
                w12=rng.uniform(-15, 15), delta2=rng.uniform(-5, 5),
                delta1=rng.uniform(-5, 5),
            )
            r = MasterRHS(p, mode)
            d = rhs(rng.uniform(0, 10), random_hermitian_state(rng), r)
            assert abs(d.trace()) <= 1e-14

    @pytest.mark.parametrize("mode", [Mode.DRIVEN, Mode.FIELD_FREE])
    def test_hermiticity_propagation(self, mode):
        rng = np.random.default_rng(12)
        for _ in range(25):
            p = params(
                gamma1=rng.uniform(0.2, 3), gamma2=rng.uniform(0.2, 3),
                theta_deg=rng.uniform(0, 90), big_g=rng.uniform(0, 10),
                small_g=rng.uniform(0, 0.5), w12=rng.uniform(-15, 15),
                delta2=rng.uniform(-5, 5), delta1=rng.uniform(-5, 5),
            )
            r = MasterRHS(p, mode)
            d = rhs(rng.uniform(0, 10), random_hermitian_state(rng), r)
            assert np.max(np.abs(d - d.conj().T)) <= 1e-14


class TestIntegrate:
    def test_pure_exponential_decay(self):
        p = params(eta0=0.0, big_g=0.0, small_g=0.0)
        traj = integrate(MasterRHS(p), DensityMatrix.from_populations(1, 0, 0), 1.0,
                         t_eval=np.array([1.0]))
        assert traj.final.rho[0, 0].real == pytest.approx(math.exp(-2.0), abs=1e-8)

    def test_trap_population_accumulates(self):
        # strong resonant pump, splitting at the lower dressed state
        from vicprobe.dressed import to_trap_basis

        p = params(big_g=20.0, w12=-20.0, small_g=0.0)
        traj = integrate(MasterRHS(p), DensityMatrix.ground_state(), 150.0,
                         t_eval=np.linspace(0.0, 150.0, 61))
        start = to_trap_basis(traj.states[0], p)
        end = to_trap_basis(traj.final, p)
        assert end.pop_uc > 0.9 > start.pop_uc
        assert end.pop_plus < 0.07
        assert end.pop_c < 0.01

    def test_field_free_coherence_grows_from_zero(self):
        p = params(big_g=0.0, small_g=0.0, w12=2.0)
        traj = integrate(MasterRHS(p, Mode.FIELD_FREE),
                         DensityMatrix.from_populations(1, 0, 0), 1.0,
                         t_eval=np.array([1.0]))
        assert abs(traj.final.rho[0, 1]) > 0.1

    def test_field_free_cross_terms_average_out_for_large_splitting(self):
        rho0 = DensityMatrix.from_populations(0.6, 0.4, 0.0)
        t_eval = np.linspace(0.0, 2.0, 21)
        pops = {}
        for eta0 in (1.0, 0.0):
            p = params(big_g=0.0, small_g=0.0, w12=500.0, eta0=eta0)
            traj = integrate(MasterRHS(p, Mode.FIELD_FREE), rho0, 2.0,
                             tol=1e-7, t_eval=t_eval)
            pops[eta0] = np.array([s.populations for s in traj.states])
        assert np.max(np.abs(pops[1.0] - pops[0.0])) < 1e-3

    def test_positivity_inside_admissible_interference(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for k in range(6):
            p = params(
                gamma1=rng.uniform(0.3, 2), gamma2=rng.uniform(0.3, 2),
                theta_deg=0.0 if k == 0 else rng.uniform(0, 90),
                big_g=rng.uniform(0, 4), small_g=rng.uniform(0, 0.3),
                w12=rng.uniform(-5, 5), delta2=rng.uniform(-3, 3),
                delta1=rng.uniform(-3, 3),
            )
            traj = integrate(MasterRHS(p), DensityMatrix.ground_state(), 50.0,
                             t_eval=np.linspace(0.0, 50.0, 101))
            worst = min(worst, min(min(s.populations) for s in traj.states))
        assert worst >= -1e-8

    def test_rejects_nonpositive_horizon(self):
        with pytest.raises(ValueError):
            integrate(MasterRHS(params()), DensityMatrix.ground_state(), 0.0)

    def test_step_size_underflow(self):
        # an error budget no explicit step can meet
        def f(t, y):
            return np.array([1e6 * math.cos(1e6 * t)])

        with pytest.raises(StepSizeUnderflow):
            integrate_adaptive(f, 0.0, np.array([0.0]), 1.0, dt0=1e-3, tol=1e-30)


class TestSteadyStatePumpOnly:
    def test_no_pump_gives_ground_state(self):
        rho = steady_state_pump_only(params(big_g=0.0))
        assert np.max(np.abs(rho.rho - DensityMatrix.ground_state().rho)) < 1e-12

    def test_saturated_two_level_limit(self):
        rho = steady_state_pump_only(params(eta0=0.0, big_g=50.0, delta2=0.0))
        assert rho.rho[0, 0].real == pytest.approx(0.0, abs=1e-12)
        assert rho.rho[1, 1].real == pytest.approx(0.5, abs=1e-3)
        assert rho.rho[2, 2].real == pytest.approx(0.5, abs=1e-3)

    def test_two_level_closed_form_across_detunings(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p = params(eta0=0.0, gamma2=rng.uniform(0.3, 4),
                       big_g=rng.uniform(0.5, 30), delta2=rng.uniform(-20, 20))
            rho = steady_state_pump_only(p)
            r22, s23 = two_level_steady_state(p)
            assert rho.rho[1, 1].real == pytest.approx(r22, abs=1e-12)
            assert rho.rho[1, 2] == pytest.approx(s23, abs=1e-12)
            assert abs(rho.rho[0, 0]) < 1e-12

    def test_residual_is_tiny(self):
        from vicprobe.master import driven_blocks, mat_to_vec9

        p = params(big_g=20.0, w12=-20.0)
        rho = steady_state_pump_only(p)
        C0, _, _ = driven_blocks(p)
        assert np.max(np.abs(C0 @ mat_to_vec9(rho.rho))) <= 1e-10

    def test_pump_coherence_matches_closed_form(self):
        from vicprobe.analytic import sigma23_exact

        p = params(gamma1=10.0, gamma2=1.0, big_g=20.0, w12=-20.0, small_g=0.0)
        rho = steady_state_pump_only(p)
        assert rho.rho[1, 2] == pytest.approx(sigma23_exact(p).sigma23, abs=1e-8)

    def test_dark_state_degeneracy_flagged(self):
        p = params(theta_deg=0.0, big_g=0.0, small_g=0.0, w12=0.0)
        with pytest.raises(SingularSystem):
            steady_state_pump_only(p)


def test_default_dt_hint_resolves_fast_scale():
    p = params(big_g=100.0)
    assert default_dt_hint(p) <= 0.1 / 100.0
    assert default_dt_hint(params(big_g=0.0, w12=0.0, delta1=0.0, delta2=0.0)) == 0.01
