import math

import numpy as np
import pytest
from scipy.integrate import quad

from dkl.geometry import eval_B
from dkl.oracle import (
    OracleParams,
    compare_oracle_vs_estimate,
    fit_survival_exponent,
    killed_bm_density,
    oracle_J,
    oracle_kappa,
    oracle_p,
    oracle_survival,
)
from dkl.quadrature import QuadratureSpec

from conftest import pt

SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-300)


class TestKilledBmDensity:
    def test_half_order_reflection_formula(self):
        # order 1/2 is the pure boundary-killed kernel
        op = OracleParams(0.5, 1, 1.0)
        for t, x, y in [(0.5, 1.0, 2.0), (2.0, 0.3, 0.4), (0.01, 1.0, 1.2)]:
            mine = killed_bm_density(op, t, pt(x), pt(y))
            ref = (
                math.exp(-((x - y) ** 2) / (4 * t))
                - math.exp(-((x + y) ** 2) / (4 * t))
            ) / math.sqrt(4 * math.pi * t)
            assert mine == pytest.approx(ref, rel=1e-13)

    def test_tangential_product_dimension(self):
        op1 = OracleParams(1.0, 1, 1.0)
        op3 = OracleParams(1.0, 3, 1.0)
        v1 = killed_bm_density(op1, 0.7, pt(1.0), pt(2.0))
        v3 = killed_bm_density(op3, 0.7, pt(0.0, 0.0, 1.0), pt(0.0, 0.0, 2.0))
        assert v3 == pytest.approx(v1 / (4 * math.pi * 0.7), rel=1e-13)

    def test_chapman_kolmogorov(self):
        op = OracleParams(1.5, 1, 1.0)
        t, s, x, y = 0.3, 0.7, 0.8, 1.7
        lhs, _ = quad(
            lambda z: killed_bm_density(op, t, pt(x), pt(z))
            * killed_bm_density(op, s, pt(z), pt(y)),
            0,
            40,
            limit=200,
        )
        rhs = killed_bm_density(op, t + s, pt(x), pt(y))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_two_sided_profile(self, rng):
        # ratio to (1 ^ xy/t)^(g+1/2) t^(-d/2) exp(-r^2/4t) is bounded
        op = OracleParams(1.0, 2, 1.0)
        ratios = []
        for _ in range(300):
            t = float(10.0 ** rng.uniform(-3, 3))
            x = pt(0.0, float(10.0 ** rng.uniform(-2, 2)))
            y = pt(float(rng.uniform(-3, 3)), float(10.0 ** rng.uniform(-2, 2)))
            num = killed_bm_density(op, t, x, y)
            prof = (
                min(1.0, x.height * y.height / t) ** 1.5
                * t**-1.0
                * math.exp(-x.distance_to(y) ** 2 / (4 * t))
            )
            if prof == 0.0:
                continue
            ratios.append(num / prof)
        assert 0.0 < min(ratios) and max(ratios) / min(ratios) < 30.0

    def test_log_form(self):
        op = OracleParams(0.5, 1, 1.0)
        v = killed_bm_density(op, 0.5, pt(1.0), pt(2.0))
        lv = killed_bm_density(op, 0.5, pt(1.0), pt(2.0), log=True)
        assert lv == pytest.approx(math.log(v), rel=1e-12)


class TestOracleP:
    def test_symmetry(self):
        op = OracleParams(0.5, 1, 1.0)
        assert oracle_p(op, 1.0, pt(1.0), pt(2.0)) == oracle_p(op, 1.0, pt(2.0), pt(1.0))

    def test_fixed_simpson_oracle(self):
        # independent reference: closed-form subordinator density (index 1/2)
        # against a 1e5-node log-spaced Simpson rule
        op = OracleParams(0.5, 1, 1.0)
        t, xh, yh = 1.0, 1.0, 2.0
        s = np.geomspace(1e-8, 1e8, 100_001)
        q = (
            np.sqrt(xh * yh)
            / (2 * s)
            * np.exp(-((xh - yh) ** 2) / (4 * s))
            * (1.0 - np.exp(-xh * yh / s))
            / np.sqrt(np.pi * xh * yh / s)
            * np.sqrt(np.pi * xh * yh / s)
        )
        # I_{1/2}(z) e^{-z} = (1 - e^{-2z}) / sqrt(2 pi z)
        z = xh * yh / (2 * s)
        q = (
            np.sqrt(xh * yh)
            / (2 * s)
            * (1.0 - np.exp(-2.0 * z))
            / np.sqrt(2 * np.pi * z)
            * np.exp(-((xh - yh) ** 2) / (4 * s))
        )
        dens = s**-1.5 * np.exp(-1.0 / (4.0 * s)) / (2.0 * np.sqrt(np.pi))
        integrand = q * dens * s  # log-axis Simpson
        w = np.log(s)
        h = w[1] - w[0]
        weights = np.ones_like(w)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        ref = float(np.dot(integrand, weights)) * h / 3.0
        mine = oracle_p(op, t, pt(xh), pt(yh))
        assert mine == pytest.approx(ref, rel=1e-4)

    def test_on_diagonal_bound(self, rng):
        op = OracleParams(0.5, 1, 1.0)
        for _ in range(20):
            t = float(10.0 ** rng.uniform(-2, 2))
            xh = float(10.0 ** rng.uniform(-1, 1))
            val = oracle_p(op, t, pt(xh), pt(xh))
            assert val * t ** (1.0 / 1.0) < 2.0

    def test_mass_submarkov_and_monotone(self):
        op = OracleParams(0.5, 1, 1.0)
        masses = []
        for t in (0.5, 1.0, 2.0):
            m, _ = quad(lambda yv: oracle_p(op, t, pt(1.0), pt(yv)), 0, 80, limit=300)
            masses.append(m)
        assert all(m <= 1.0 + 1e-8 for m in masses)
        assert all(a >= b - 1e-8 for a, b in zip(masses, masses[1:]))

    def test_scaling(self):
        op = OracleParams(1.0, 1, 1.2)
        r = 2.0
        v1 = oracle_p(op, 1.0, pt(0.5), pt(1.5))
        v2 = oracle_p(op, 1.0 / r**1.2, pt(0.25), pt(0.75))
        assert v1 == pytest.approx(v2 / r, rel=1e-6)


class TestOracleJ:
    def test_comparability_to_weight_kernel(self):
        op = OracleParams(0.5, 1, 1.0)
        b = (1.0, 1.0, 0.0, 0.0)
        ratios = []
        for xh in (0.1, 1.0, 5.0):
            for yh in (0.2, 2.0, 8.0):
                num = oracle_J(op, pt(xh), pt(yh))
                den = eval_B(b, pt(xh), pt(yh)) * abs(xh - yh) ** -2.0
                ratios.append(num / den)
        assert max(ratios) / min(ratios) < 10.0

    def test_scaling(self):
        op = OracleParams(0.5, 1, 1.0)
        v1 = oracle_J(op, pt(0.5), pt(1.5))
        v2 = oracle_J(op, pt(1.0), pt(3.0))
        assert v2 == pytest.approx(v1 * 2.0 ** (-2.0), rel=1e-8)

    def test_interior_plateau(self):
        # deep pairs approach the free stable kernel: the normalized value
        # stabilizes along a sequence of increasingly deep pairs
        op = OracleParams(0.5, 1, 1.0)
        vals = [
            oracle_J(op, pt(h), pt(h + 1.0)) * 1.0
            for h in (4.0, 16.0, 64.0)
        ]
        assert abs(vals[-1] - vals[-2]) / vals[-1] < 0.05


class TestOracleKappa:
    def test_exact_dirichlet_cauchy_constant(self):
        # order 1/2 at unit stability index: the constant is exactly 2/pi
        op = OracleParams(0.5, 1, 1.0)
        val = oracle_kappa(op, pt(1.0))
        assert val == pytest.approx(2.0 / math.pi, rel=1e-6)

    def test_homogeneity(self):
        for gamma, alpha in [(0.0, 1.0), (1.5, 0.6)]:
            op = OracleParams(gamma, 1, alpha)
            vals = [oracle_kappa(op, pt(h)) * h**alpha for h in (0.1, 1.0, 10.0)]
            spread = (max(vals) - min(vals)) / abs(np.mean(vals))
            assert spread < 1e-3

    def test_tangential_invariance(self):
        op = OracleParams(1.0, 2, 1.0)
        a = oracle_kappa(op, pt(0.0, 1.0))
        b = oracle_kappa(op, pt(57.0, 1.0))
        assert a == b

    def test_independent_mesh_oracle(self):
        # fixed-mesh double integral of the mass defect for the 2/pi case
        op = OracleParams(0.5, 1, 1.0)
        t = np.geomspace(1e-7, 1e7, 3001)
        one_minus_mass = np.array(
            [math.erfc(1.0 / (2.0 * math.sqrt(ti))) for ti in t]
        )
        w = np.log(t)
        integrand = one_minus_mass * t**-0.5  # nu has exponent -1 - 1/2, times t
        h = w[1] - w[0]
        weights = np.ones_like(w)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        ref = float(np.dot(integrand, weights)) * h / 3.0 * 0.5 / math.gamma(0.5)
        assert oracle_kappa(op, pt(1.0)) == pytest.approx(ref, rel=1e-3)


class TestSurvival:
    def test_exponent_fit_near_profile_order(self):
        op = OracleParams(0.5, 1, 1.0)
        q_fit, r2 = fit_survival_exponent(op)
        assert r2 > 0.999
        # recorded observation: the fitted exponent tracks gamma + 1/2
        assert abs(q_fit - 1.0) < 0.05

    def test_survival_monotone_in_position(self):
        op = OracleParams(1.0, 1, 0.8)
        xs = [1e-3, 1e-2, 1e-1, 1.0]
        vals = [oracle_survival(op, v) for v in xs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= 1.0 + 1e-6


class TestComparison:
    def test_interior_cells_near_on_diagonal(self):
        op = OracleParams(0.5, 1, 1.0)
        rep, q_fit, r2 = compare_oracle_vs_estimate(
            op,
            ts=(1.0,),
            xs=(2.0, 4.0),
            ys=(2.5, 4.5),
            ceiling=math.inf,
        )
        assert r2 > 0.99
        assert 0.05 < rep.min_ratio and rep.max_ratio < 20.0

    def test_dim_guard(self):
        with pytest.raises(ValueError):
            compare_oracle_vs_estimate(OracleParams(0.5, 3, 1.0))
