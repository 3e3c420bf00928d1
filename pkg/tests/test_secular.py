import math

import numpy as np
import pytest

import oracle_utils
from quadsub import secular
from quadsub.errors import DomainError, InvalidInputError, PoleEvaluationError


def ball_spec(alphas, csq):
    return secular.SecularSpec(np.asarray(alphas, float), np.asarray(csq, float))


def reg_spec(alphas, csq, sigma, p):
    return secular.SecularSpec(np.asarray(alphas, float), np.asarray(csq, float),
                               sigma=sigma, p_exponent=p)


class TestEvaluation:
    def test_phi_values(self):
        spec = ball_spec([-1.0], [1.0])
        assert secular.phi_eval(spec, 0.0) == (0.0, 2.0, 6.0)
        assert secular.phi_eval(spec, 2.0)[0] == 0.0

    def test_phi_dead_weight_has_no_pole(self):
        spec = ball_spec([-1.0], [0.0])
        value, d1, d2 = secular.phi_eval(spec, -1.0)
        assert value == -1.0 and d1 == 0.0 and d2 == 0.0

    def test_phi_live_pole_raises(self):
        with pytest.raises(PoleEvaluationError):
            secular.phi_eval(ball_spec([-1.0], [1.0]), 1.0)

    def test_h_values(self):
        spec = reg_spec([-1.0], [4.0], 1.0, 3.0)
        assert secular.h_eval(spec, 2.0)[0] == 0.0
        spec4 = reg_spec([-1.0], [4.0], 1.0, 4.0)
        assert secular.h_eval(spec4, 2.0)[0] == 2.0

    def test_h_domain(self):
        spec = reg_spec([-1.0], [4.0], 1.0, 3.0)
        with pytest.raises(DomainError):
            secular.h_eval(spec, 0.0)
        with pytest.raises(DomainError):
            secular.h_eval(spec, -1.0)

    def test_p_value_and_slope_link(self):
        spec = reg_spec([-1.0], [4.0], 1.0, 3.0)
        value, slope = secular.p_eval(spec, 2.0)
        assert abs(value - (math.log(4.0) - 2.0 * math.log(2.0))) < 1e-15
        h_value, h_slope = secular.h_eval(spec, 2.0)
        assert h_value == 0.0
        assert abs(slope - h_slope * 2.0**-2.0) <= 1e-10 * abs(slope)

    def test_p_rejects_dead_spectrum(self):
        spec = reg_spec([-1.0], [0.0], 1.0, 3.0)
        with pytest.raises(DomainError):
            secular.p_eval(spec, 2.0)

    def test_mode_mismatch(self):
        with pytest.raises(InvalidInputError):
            secular.phi_eval(reg_spec([-1.0], [1.0], 1.0, 3.0), 0.0)
        with pytest.raises(InvalidInputError):
            secular.h_eval(ball_spec([-1.0], [1.0]), 1.0)

    def test_spec_validation(self):
        with pytest.raises(InvalidInputError):
            secular.SecularSpec(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(InvalidInputError):
            secular.SecularSpec(np.array([0.0]), np.array([-1.0]))
        with pytest.raises(InvalidInputError):
            secular.SecularSpec(np.array([0.0]), np.array([1.0]), sigma=1.0)


class TestDerivativeOracles:
    def test_finite_differences(self, rng):
        # derivative formulas vs central differences at pole-free points
        for _ in range(20):
            n = int(rng.integers(1, 9))
            alphas = np.sort(rng.normal(size=n) * 2)
            csq = rng.random(n)
            spec = ball_spec(alphas, csq)
            sigma = float(rng.uniform(0.5, 2.0))
            p = float(rng.choice([2.5, 3.0, 4.0]))
            spec_reg = reg_spec(alphas, csq, sigma, p)
            scale = 1.0 + np.max(np.abs(alphas))
            checked = 0
            while checked < 100:
                lam = float(rng.uniform(-6, 6) * scale)
                if np.min(np.abs(alphas + lam)) < 0.05 * scale:
                    continue
                step = 1e-6 * (1 + abs(lam))
                v0, d1, d2 = secular.phi_eval(spec, lam)
                vp, dp, _ = secular.phi_eval(spec, lam + step)
                vm, dm, _ = secular.phi_eval(spec, lam - step)
                assert abs((vp - vm) / (2 * step) - d1) <= 1e-6 * (1 + abs(d1))
                assert abs((dp - dm) / (2 * step) - d2) <= 1e-6 * (1 + abs(d2))
                t = float(rng.uniform(0.05, 6.0) * scale)
                if np.min(np.abs(sigma * t + alphas)) >= 0.05 * scale:
                    step = 1e-6 * (1 + t)
                    _, hd = secular.h_eval(spec_reg, t)
                    hp = secular.h_eval(spec_reg, t + step)[0]
                    hm = secular.h_eval(spec_reg, t - step)[0]
                    assert abs((hp - hm) / (2 * step) - hd) <= 1e-6 * (1 + abs(hd))
                    _, pd = secular.p_eval(spec_reg, t)
                    pp = secular.p_eval(spec_reg, t + step)[0]
                    pm = secular.p_eval(spec_reg, t - step)[0]
                    assert abs((pp - pm) / (2 * step) - pd) <= 1e-6 * (1 + abs(pd))
                checked += 1

    def test_slope_link_at_roots(self, rng):
        # p'(t) = h'(t) * t^(-2/(p-2)) at every root of h
        for _ in range(30):
            n = int(rng.integers(1, 7))
            alphas = np.sort(rng.normal(size=n) * 2)
            csq = rng.random(n) + 0.05
            sigma = float(rng.uniform(0.5, 2.0))
            p = float(rng.choice([2.5, 3.0, 4.0]))
            spec = reg_spec(alphas, csq, sigma, p)
            poles = sorted(-a / sigma for a, w in zip(alphas, csq) if w > 0 and a < 0)
            left = poles[-1] if poles else 0.0
            root = secular.bracket_unbounded_root("h", spec, left)
            _, h_slope = secular.h_eval(spec, root)
            _, p_slope = secular.p_eval(spec, root)
            expected = h_slope * root ** (-2.0 / (p - 2.0))
            assert abs(p_slope - expected) <= 1e-10 * (1 + abs(expected))


class TestRootIsolation:
    def test_single_root_each_unbounded_side(self):
        spec = ball_spec([-1.0], [1.0])
        right = secular.convex_roots_on_interval("phi", spec, (1.0, np.inf))
        assert right.roots == (2.0,)
        assert right.derivative_signs == (-1,)
        left = secular.convex_roots_on_interval("phi", spec, (-np.inf, 1.0))
        assert len(left.roots) == 1
        assert abs(left.roots[0]) < 1e-12
        assert left.derivative_signs == (1,)

    def test_two_roots_frozen_oracle(self):
        # dense sign-scan oracle values for alphas=(-4,-1), csq=(0.09,0.25)
        spec = ball_spec([-4.0, -1.0], [0.09, 0.25])
        found = secular.convex_roots_on_interval("phi", spec, (1.0, 4.0))
        np.testing.assert_allclose(found.roots,
                                   [1.5036501200055112, 3.6946984118180266],
                                   atol=1e-9)
        assert found.derivative_signs == (-1, 1)

    def test_no_roots_when_minimum_positive(self):
        spec = ball_spec([-4.0, -1.0], [25.0, 25.0])
        found = secular.convex_roots_on_interval("phi", spec, (1.0, 4.0))
        assert found.roots == ()

    def test_root_residuals_random(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 8))
            alphas = np.sort(rng.normal(size=n) * 2)
            csq = rng.random(n) + 1e-3
            spec = ball_spec(alphas, csq)
            clusters = secular.cluster_eigenvalues(alphas, csq)
            poles = sorted(-cl.value for cl in clusters if cl.live)
            for lo, hi in zip(poles, poles[1:]):
                found = secular.convex_roots_on_interval("phi", spec, (lo, hi))
                for root in found.roots:
                    value, slope, _ = secular.phi_eval(spec, root)
                    assert abs(value) <= 10 * 1e-12 * (1 + abs(slope))
                if len(found.roots) == 2:
                    assert found.derivative_signs[0] == -1
                    assert found.derivative_signs[1] == 1

    def test_matches_scan_oracle_random(self, rng):
        for _ in range(15):
            alphas = np.sort(rng.normal(size=3) * 2)
            csq = rng.random(3) + 0.05
            spec = ball_spec(alphas, csq)
            clusters = secular.cluster_eigenvalues(alphas, csq)
            poles = sorted(-cl.value for cl in clusters if cl.live)
            for lo, hi in zip(poles, poles[1:]):
                if hi - lo < 1e-4:
                    continue
                mine = secular.convex_roots_on_interval("phi", spec, (lo, hi)).roots
                ref = oracle_utils.scan_roots(
                    lambda lam: oracle_utils.phi_direct(alphas, csq, lam),
                    lo + 1e-7 * (1 + abs(lo)), hi - 1e-7 * (1 + abs(hi)))
                assert len(mine) == len(ref)
                for a, b in zip(sorted(mine), ref):
                    assert abs(a - b) < 1e-6

    def test_zero_weight_index_deletion_equivalence(self, rng):
        for _ in range(20):
            alphas = np.sort(rng.normal(size=4) * 2)
            csq = rng.random(4) + 0.05
            kill = int(rng.integers(0, 4))
            csq_dead = csq.copy()
            csq_dead[kill] = 0.0
            full = ball_spec(alphas, csq_dead)
            reduced = ball_spec(np.delete(alphas, kill), np.delete(csq, kill))
            for lam in rng.uniform(-8, 8, size=20):
                dist_full = np.min(np.abs(np.delete(alphas, kill) + lam))
                if dist_full < 1e-6:
                    continue
                va = secular.phi_eval(full, float(lam))
                vb = secular.phi_eval(reduced, float(lam))
                np.testing.assert_allclose(va, vb, rtol=0, atol=0)

    def test_bracket_unbounded_examples(self):
        spec = reg_spec([-1.0], [4.0], 1.0, 3.0)
        assert abs(secular.bracket_unbounded_root("h", spec, 1.0) - 2.0) < 1e-11
        spec2 = reg_spec([-1.0], [9.0 / 16.0], 1.0, 3.0)
        # hand algebra: t(t-1) = 3/4 so t = 3/2, confirmed by bisection oracle
        assert abs(secular.bracket_unbounded_root("h", spec2, 1.0) - 1.5) < 1e-11
        spec3 = ball_spec([-1.0], [1.0])
        assert abs(secular.bracket_unbounded_root("phi", spec3, 1.0) - 2.0) < 1e-11

    def test_unbounded_p_is_rejected(self):
        spec = reg_spec([-1.0], [1.0], 1.0, 3.0)
        with pytest.raises(InvalidInputError):
            secular.convex_roots_on_interval("p", spec, (1.0, np.inf))


class TestClustering:
    def test_merges_close_eigenvalues(self):
        alphas = np.array([-1.0, -1.0 + 1e-12, 2.0])
        csq = np.array([0.5, 0.25, 0.0])
        clusters = secular.cluster_eigenvalues(alphas, csq)
        assert len(clusters) == 2
        assert clusters[0].indices == (0, 1)
        assert clusters[0].weight == 0.75
        assert clusters[0].live
        assert not clusters[1].live

    def test_keeps_separated_eigenvalues(self):
        clusters = secular.cluster_eigenvalues(np.array([-1.0, 1.0]), np.array([1.0, 1.0]))
        assert len(clusters) == 2
