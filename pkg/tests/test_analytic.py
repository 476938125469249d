import math

import numpy as np
import pytest

from vicprobe.analytic import (
    rho13_no_vic,
    sigma23_exact,
    sigma23_small_theta,
    trap_populations_small_theta,
)
from vicprobe.dressed import dressed_basis
from vicprobe.errors import RegimeViolation, ZeroDenominator, ZeroPump
from vicprobe.master import steady_state_pump_only
from vicprobe.model import make_params


def params(**over):
    raw = dict(gamma1=1.0, gamma2=1.0, theta_deg=15.0, eta0=1.0, big_g=20.0,
               small_g=0.0, w12=-20.0, delta2=0.0, delta1=0.0)
    raw.update(over)
    return make_params(raw)


def random_regime_params(rng):
    G = rng.uniform(1.0, 50.0)
    return params(
        gamma1=rng.uniform(0.2, 5.0), gamma2=rng.uniform(0.2, 5.0),
        theta_deg=rng.uniform(0.5, 90.0), big_g=G, w12=-G,
        eta0=float(rng.integers(0, 2)),
    )


class TestRho13NoVic:
    def test_resonant_value(self):
        p = params(big_g=10.0, w12=0.0, delta1=0.0, delta2=0.0, small_g=1.0)
        val = rho13_no_vic(p)
        assert val == pytest.approx(1j * 102.0 / 20502.0, abs=1e-15)

    def test_absorptive_part_positive(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            G = rng.uniform(0.5, 50.0)
            p = params(
                gamma1=rng.uniform(0.2, 5), gamma2=rng.uniform(0.2, 5),
                big_g=G, w12=0.0, delta2=rng.uniform(-20, 20),
                delta1=rng.uniform(-3 * G, 3 * G), small_g=1.0,
            )
            assert rho13_no_vic(p).imag > 0.0

    def test_doublet_positions(self):
        # the closed-form resonance positions are the vanishing-linewidth
        # asymptotics; finite gamma pulls each peak by about
        # (g1+g2)^2 / (2 * splitting)
        g1 = g2 = 1.0
        for G, d2 in ((10.0, 0.0), (4.0, 3.0)):
            splitting = math.hypot(d2, 2 * G)
            lam_p = (d2 + splitting) / 2
            lam_m = (d2 - splitting) / 2
            grid = np.linspace(lam_m - 5, lam_p + 5, 2001)
            step = grid[1] - grid[0]
            vals = np.array([
                rho13_no_vic(params(gamma1=g1, gamma2=g2, big_g=G, w12=0.0,
                                    delta2=d2, delta1=float(d), small_g=1.0)).imag
                for d in grid
            ])
            pulling = (g1 + g2) ** 2 / (2 * splitting)
            for lam in (lam_m, lam_p):
                window = (grid > lam - 3) & (grid < lam + 3)
                peak = grid[window][np.argmax(vals[window])]
                assert abs(peak - lam) < pulling + step

    def test_pole_guard(self):
        # the pole needs vanishing linewidths; the guard fires before the
        # division blows up
        p = params(gamma1=1e-15, gamma2=1e-15, big_g=1.0, w12=0.0,
                   delta2=0.0, delta1=1.0, small_g=1.0)
        with pytest.raises(ZeroDenominator):
            rho13_no_vic(p)


class TestSigma23Exact:
    def test_regime_enforced(self):
        with pytest.raises(RegimeViolation):
            sigma23_exact(params(delta2=0.5))
        with pytest.raises(RegimeViolation):
            sigma23_exact(params(w12=-19.0))

    def test_no_interference_limit_is_two_level(self):
        p = params(eta0=0.0, gamma2=2.0, big_g=7.0, w12=-7.0)
        resp = sigma23_exact(p)
        g2, G = 2.0, 7.0
        assert resp.sigma23 == pytest.approx(1j * G * g2 / (g2**2 + 2 * G**2), abs=1e-14)
        assert resp.sigma_mm == pytest.approx(resp.sigma_pp, abs=1e-12)
        assert abs(resp.sigma_pm.imag) > 1e-3
        assert resp.sigma11 == pytest.approx(0.0, abs=1e-15)

    def test_matches_numerical_steady_state(self):
        rng = np.random.default_rng(30)
        for _ in range(30):
            p = random_regime_params(rng)
            resp = sigma23_exact(p)
            rho = steady_state_pump_only(p)
            ud = dressed_basis(p).u_dressed
            sd = ud @ rho.rho @ ud.T
            assert rho.rho[1, 2] == pytest.approx(resp.sigma23, abs=1e-8)
            assert sd[0, 0].real == pytest.approx(resp.sigma11, abs=1e-8)
            assert sd[2, 2].real == pytest.approx(resp.sigma_mm, abs=1e-8)
            assert sd[1, 1].real == pytest.approx(resp.sigma_pp, abs=1e-8)
            assert sd[1, 2] == pytest.approx(resp.sigma_pm, abs=1e-8)

    def test_population_sum_rule(self):
        # transcription check: the three dressed populations are complete
        rng = np.random.default_rng(31)
        for _ in range(200):
            resp = sigma23_exact(random_regime_params(rng))
            assert resp.sigma11 + resp.sigma_mm + resp.sigma_pp == pytest.approx(1.0, abs=1e-10)

    def test_coherence_population_identity(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            resp = sigma23_exact(random_regime_params(rng))
            rebuilt = (resp.sigma_mm - resp.sigma_pp) / 2 + 1j * resp.sigma_pm.imag
            assert resp.sigma23 == pytest.approx(rebuilt, abs=1e-10)

    def test_strong_dispersion_point(self):
        resp = sigma23_exact(params(gamma1=10.0, gamma2=1.0))
        # frozen from this closed form, cross-checked against the numerical
        # steady state at machine precision
        assert resp.sigma23.real == pytest.approx(0.41209515620832887, rel=1e-12)
        assert resp.sigma23.imag == pytest.approx(0.0031239348367401464, rel=1e-9)
        assert resp.sigma23.real > 0.4
        assert abs(resp.sigma23.imag) < 0.05 * resp.sigma23.real

    def test_b_constant_positive_for_admissible_parameters(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            resp = sigma23_exact(random_regime_params(rng))
            assert resp.b_const > 0.0


class TestSigma23SmallTheta:
    def test_aligned_dipoles_purely_real(self):
        # gamma1 = gamma2 = 1 makes eta^2 = gamma1*gamma2 exact in floating
        # point, so the absorptive term vanishes identically
        val = sigma23_small_theta(params(theta_deg=0.0))
        assert val.imag == 0.0
        assert val.real == pytest.approx(1.0 / 3.0, abs=1e-15)
        # unequal rates: squares of square roots leave a rounding residue
        p = params(theta_deg=0.0, gamma1=2.0, gamma2=1.0, big_g=15.0, w12=-15.0)
        val = sigma23_small_theta(p)
        assert abs(val.imag) < 1e-15
        assert val.real == pytest.approx(2.0 / 5.0, abs=1e-15)

    def test_equal_rates_give_one_third(self):
        assert sigma23_small_theta(params()).real == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_zero_pump_rejected(self):
        with pytest.raises(ZeroPump):
            sigma23_small_theta(params(big_g=0.0, w12=0.0))

    def test_accuracy_against_exact_at_figure_parameters(self):
        # honest accuracy of the approximation at theta = 15 deg, fast |1>
        # decay: about 13.5% on the real part and 7% on the imaginary part
        p = params(gamma1=10.0, gamma2=1.0)
        approx = sigma23_small_theta(p)
        exact = sigma23_exact(p).sigma23
        rel_re = abs(approx.real - exact.real) / abs(exact.real)
        rel_im = abs(approx.imag - exact.imag) / abs(exact.imag)
        assert rel_re == pytest.approx(0.1555, abs=0.002)
        assert rel_im == pytest.approx(0.072, abs=0.002)
        assert rel_re < 0.2 and rel_im < 0.2

    def test_deviation_shrinks_with_angle(self):
        devs = []
        for th in (1.0, 5.0, 15.0):
            p = params(theta_deg=th, gamma1=10.0, gamma2=1.0)
            approx = sigma23_small_theta(p)
            exact = sigma23_exact(p).sigma23
            devs.append(abs(approx - exact))
        assert devs[0] < devs[1] < devs[2]


class TestTrapPopulationsSmallTheta:
    def test_equal_rates(self):
        s11, s_mm, s_pp, im_pm = trap_populations_small_theta(params())
        assert s11 == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert s_mm == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert s_mm > s11

    def test_fast_partner_decay_inverts_populations(self):
        p = params(gamma1=1.0, gamma2=6.0, big_g=20.0, w12=-20.0)
        s11, s_mm, _, _ = trap_populations_small_theta(p)
        assert s11 == pytest.approx(6.0 / 8.0, abs=1e-15)
        assert s_mm == pytest.approx(2.0 / 8.0, abs=1e-15)
        assert s11 > s_mm

    def test_aligned_dipoles_empty_upper_state(self):
        _, _, s_pp, im_pm = trap_populations_small_theta(params(theta_deg=0.0))
        assert s_pp == 0.0
        assert im_pm == 0.0

    def test_zero_pump_rejected(self):
        with pytest.raises(ZeroPump):
            trap_populations_small_theta(params(big_g=0.0, w12=0.0))
