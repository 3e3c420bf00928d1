import numpy as np
import pytest

import oracle_utils
from quadsub import trs
from quadsub.errors import InternalContradictionError, InvalidInputError
from quadsub.generate import random_instance
from quadsub.trs import Classification, TrsInstance, TrsKktPoint

# 2x2 instance with a confirmed local-nonglobal minimizer; multipliers and
# objectives frozen from the dense per-interval sign-scan oracle
LNG_Q = np.array([[-0.2800008978644142, 0.42593408121882664],
                  [0.42593408121882664, -0.056066655275819666]])
LNG_C = np.array([0.11046414324948059, 0.06378177425506196])
LNG_MULTIPLIER = 0.5594134361796546
LNG_OBJECTIVE = -0.26405184336277493
LNG_GLOBAL_MULTIPLIER = 0.6573637995203867
LNG_GLOBAL_OBJECTIVE = -0.36023414075312693


def closed_form_instance():
    return TrsInstance(q=[[-1.0]], c=[-0.75])


class TestInstanceValidation:
    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidInputError):
            TrsInstance(q=[[0.0, 1.0], [0.0, 0.0]], c=[0.0, 0.0])

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            TrsInstance(q=[[1.0]], c=[1.0, 2.0])

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            TrsInstance(q=np.zeros((0, 0)), c=np.zeros(0))


class TestToSpectral:
    def test_diagonal_instance(self):
        sf = trs.to_spectral(TrsInstance(q=np.diag([-1.0, 2.0]), c=[1.0, 0.0]))
        np.testing.assert_allclose(sf.alphas, [-1.0, 2.0])
        np.testing.assert_allclose(np.abs(sf.c_rot), [1.0, 0.0])

    def test_offdiagonal(self):
        sf = trs.to_spectral(TrsInstance(q=[[0.0, 1.0], [1.0, 0.0]], c=[0.0, 0.0]))
        np.testing.assert_allclose(sf.alphas, [-1.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(sf.c_rot, [0.0, 0.0], atol=0)

    def test_objective_agreement_random(self, rng):
        q = rng.normal(size=(5, 5))
        q = 0.5 * (q + q.T)
        c = rng.normal(size=5)
        inst = TrsInstance(q=q, c=c)
        sf = trs.to_spectral(inst)
        for _ in range(100):
            x = rng.normal(size=5)
            y = sf.basis.T @ x
            rotated = 0.5 * float(y @ (sf.alphas * y)) + float(sf.c_rot @ y)
            assert abs(rotated - inst.objective(x)) <= 1e-10 * (1 + abs(rotated))


class TestEnumerate:
    def test_closed_form_points(self):
        # n=1 hand algebra: phi(lam) = (9/16)/(lam-1)^2 - 1, interior x=-3/4
        points = trs.enumerate_kkt(closed_form_instance())
        expected = [(0.0, 9.0 / 32.0), (0.25, 0.25), (1.75, -1.25)]
        assert len(points) == 3
        for point, (lam, obj) in zip(points, expected):
            assert abs(point.multiplier - lam) <= 1e-10
            assert abs(point.objective - obj) <= 1e-10

    def test_symmetric_negative_definite(self):
        points = trs.enumerate_kkt(TrsInstance(q=[[-1.0]], c=[0.0]))
        assert len(points) == 3
        assert points[0].multiplier == 0.0 and not points[0].on_boundary
        assert {round(float(p.x[0]), 12) for p in points[1:]} == {-1.0, 1.0}
        assert all(p.continuum for p in points[1:])
        assert all(abs(p.multiplier - 1.0) < 1e-12 for p in points[1:])

    def test_2d_oracle_case(self):
        # frozen dense sign-scan oracle: diag(-4,-1), c=(0.3,0.5)
        inst = TrsInstance(q=np.diag([-4.0, -1.0]), c=[0.3, 0.5])
        points = trs.enumerate_kkt(inst)
        expected = [
            (0.0, 0.13625),
            (0.4981550385399739, 0.012853760387303237),
            (1.5036501200055112, -0.9819869075256469),
            (3.6946984118180266, -1.7463413490255064),
            (4.303496429636489, -2.3378588371694757),
        ]
        assert len(points) == len(expected)
        for point, (lam, obj) in zip(points, expected):
            assert abs(point.multiplier - lam) <= 1e-9
            assert abs(point.objective - obj) <= 1e-9

    def test_matches_scan_oracle_random(self, rng):
        for _ in range(10):
            inst = random_instance("trs", int(rng.integers(1, 5)), rng)
            mine = [(p.multiplier, p.objective) for p in trs.enumerate_kkt(inst)]
            ref = oracle_utils.trs_kkt_points_oracle(inst.q, inst.c)
            assert len(mine) == len(ref)
            for (l1, f1), (l2, f2) in zip(mine, ref):
                assert abs(l1 - l2) < 1e-6 and abs(f1 - f2) < 1e-6

    def test_residual_invariants_random(self, random_trs_instances):
        for inst in random_trs_instances:
            bound = 1e-8 * (1 + np.linalg.norm(inst.c))
            for p in trs.enumerate_kkt(inst):
                x, lam = p.x, p.multiplier
                nrm2 = float(x @ x)
                assert np.linalg.norm(inst.q @ x + lam * x + inst.c) <= bound
                assert nrm2 <= 1 + 1e-10
                assert abs(lam * (nrm2 - 1)) <= 1e-10
                assert lam >= -1e-12

    def test_sorted_by_multiplier(self, random_trs_instances):
        for inst in random_trs_instances:
            lams = [p.multiplier for p in trs.enumerate_kkt(inst)]
            assert lams == sorted(lams)


class TestClassify:
    def test_closed_form_labels(self):
        inst = closed_form_instance()
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        labels = [p.classification for p in points]
        assert labels == [Classification.NOT_LOCAL_MIN, Classification.NOT_LOCAL_MIN,
                          Classification.GLOBAL]

    def test_equal_leading_eigenvalues_never_lng(self, rng):
        # multiplicity in the smallest eigenvalue rules the window out
        for _ in range(10):
            c = rng.normal(size=2)
            inst = TrsInstance(q=np.diag([-1.0, -1.0]), c=c)
            points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
            assert all(p.classification is not Classification.LOCAL_NONGLOBAL
                       for p in points)

    def test_negative_definite_symmetric_global_pair(self):
        inst = TrsInstance(q=[[-1.0]], c=[0.0])
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        by_lam = {round(p.multiplier, 6): p.classification for p in points}
        assert by_lam[0.0] is Classification.NOT_LOCAL_MIN
        assert by_lam[1.0] is Classification.GLOBAL

    def test_lng_instance(self):
        inst = TrsInstance(q=LNG_Q, c=LNG_C)
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        lngs = [p for p in points if p.classification is Classification.LOCAL_NONGLOBAL]
        assert len(lngs) == 1
        assert abs(lngs[0].multiplier - LNG_MULTIPLIER) < 1e-9
        assert abs(lngs[0].objective - LNG_OBJECTIVE) < 1e-9

    def test_psd_interior_is_global(self):
        inst = TrsInstance(q=np.diag([1.0, 2.0]), c=[0.1, 0.1])
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        interior = [p for p in points if not p.on_boundary]
        assert len(interior) == 1
        assert interior[0].classification is Classification.GLOBAL

    def test_at_most_one_lng_random(self, random_trs_instances):
        for inst in random_trs_instances:
            points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
            lngs = [p for p in points
                    if p.classification is Classification.LOCAL_NONGLOBAL]
            assert len(lngs) <= 1
            for p in lngs:
                assert p.multiplier > 0
                assert abs(np.linalg.norm(p.x) - 1) <= 1e-10


class TestChecks:
    def test_monotonicity_passes_closed_form(self):
        inst = closed_form_instance()
        points = trs.enumerate_kkt(inst)
        assert trs.check_multiplier_monotonicity(points).passed

    def test_monotonicity_rejects_fabricated_violation(self):
        fake = [
            TrsKktPoint(x=np.zeros(1), multiplier=0.0, objective=0.0, on_boundary=False),
            TrsKktPoint(x=np.ones(1), multiplier=1.0, objective=1.0, on_boundary=True),
        ]
        res = trs.check_multiplier_monotonicity(fake)
        assert not res.passed
        assert res.witness["multipliers"] == [0.0, 1.0]

    def test_monotonicity_single_point_vacuous(self):
        lone = [TrsKktPoint(x=np.zeros(1), multiplier=0.0, objective=0.0,
                            on_boundary=False)]
        assert trs.check_multiplier_monotonicity(lone).passed

    def test_equal_norm_identity_hand_pair(self):
        # boundary pair of the n=1 instance: f2-f1 = 3/2 = (lam1-lam2)/4*|x1-x2|^2
        inst = closed_form_instance()
        points = [p for p in trs.enumerate_kkt(inst) if p.on_boundary]
        assert len(points) == 2
        assert trs.check_equal_norm_identity(points).passed

    def test_equal_norm_identity_skips_distinct_norms(self):
        pair = [
            TrsKktPoint(x=np.array([0.3]), multiplier=0.0, objective=5.0,
                        on_boundary=False),
            TrsKktPoint(x=np.array([1.0]), multiplier=2.0, objective=-1.0,
                        on_boundary=True),
        ]
        assert trs.check_equal_norm_identity(pair).passed

    def test_equal_norm_identity_identical_points(self):
        p = TrsKktPoint(x=np.array([1.0]), multiplier=2.0, objective=-1.0,
                        on_boundary=True)
        assert trs.check_equal_norm_identity([p, p]).passed

    def test_second_smallest_vacuous_without_lng(self):
        inst = closed_form_instance()
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        assert trs.check_second_smallest(points).passed

    def test_second_smallest_on_lng_instance(self):
        inst = TrsInstance(q=LNG_Q, c=LNG_C)
        points = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
        assert trs.check_second_smallest(points).passed

    def test_second_smallest_rejects_fabricated_violation(self):
        fake = [
            TrsKktPoint(x=np.array([1.0, 0.0]), multiplier=3.0, objective=-2.0,
                        on_boundary=True, classification=Classification.GLOBAL),
            TrsKktPoint(x=np.array([0.0, 1.0]), multiplier=1.0, objective=0.5,
                        on_boundary=True,
                        classification=Classification.LOCAL_NONGLOBAL),
            TrsKktPoint(x=np.array([0.0, -1.0]), multiplier=0.5, objective=0.0,
                        on_boundary=True,
                        classification=Classification.NOT_LOCAL_MIN),
        ]
        res = trs.check_second_smallest(fake)
        assert not res.passed


class TestSolve:
    def test_closed_form(self):
        best, lng = trs.solve(closed_form_instance())
        assert abs(best.multiplier - 1.75) <= 1e-10
        assert abs(best.objective + 1.25) <= 1e-10
        assert lng is None

    def test_symmetric_global_value(self):
        best, lng = trs.solve(TrsInstance(q=[[-1.0]], c=[0.0]))
        assert abs(best.objective + 0.5) <= 1e-12
        assert lng is None

    def test_2d_oracle_global(self):
        best, lng = trs.solve(TrsInstance(q=np.diag([-4.0, -1.0]), c=[0.3, 0.5]))
        assert abs(best.multiplier - 4.303496429636489) <= 1e-9
        assert lng is not None
        assert abs(lng.multiplier - 3.6946984118180266) <= 1e-9

    def test_global_beats_ball_samples(self, rng):
        for _ in range(10):
            inst = random_instance("trs", int(rng.integers(1, 6)), rng)
            best, _ = trs.solve(inst)
            sampled = oracle_utils.ball_sample_min(inst.q, inst.c, 20000,
                                                   int(rng.integers(0, 2**31)))
            assert best.objective <= sampled + 1e-9


class TestBasisInvariance:
    def test_multiset_agreement(self, rng):
        for _ in range(15):
            inst = random_instance("trs", int(rng.integers(2, 7)), rng)
            v, r = np.linalg.qr(rng.normal(size=(inst.n, inst.n)))
            v = v * np.sign(np.diag(r))
            rotated = TrsInstance(q=v @ inst.q @ v.T, c=v @ inst.c)
            base = sorted((p.multiplier, p.objective) for p in trs.enumerate_kkt(inst))
            conj = sorted((p.multiplier, p.objective) for p in trs.enumerate_kkt(rotated))
            assert len(base) == len(conj)
            for (l1, f1), (l2, f2) in zip(base, conj):
                assert abs(l1 - l2) <= 1e-8 * (1 + abs(l1))
                assert abs(f1 - f2) <= 1e-8 * (1 + abs(f1))
