import math

import pytest

from dkl.inequalities import REGISTRY, check, lemma_ids
from dkl.quadrature import QuadratureSpec
from dkl.report import ComparabilityReport

SPEC = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12)
BUDGET = 150


class TestRegistry:
    def test_expected_entries(self):
        expected = {
            "slowly_varying",
            "slowly_varying_2",
            "kill_log",
            "kill_log_2",
            "cal_00",
            "cal_0",
            "l_cal1",
            "cal_new1",
            "cal_new2",
            "cal_basic",
            "cal_2",
            "cal_3",
            "cal_green",
            "comp_AB",
            "two_jump_region",
            "lower_2",
        }
        assert set(lemma_ids()) == expected

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            check("no_such_lemma", 0, 10, SPEC)


class TestFrozenCeilings:
    @pytest.mark.parametrize("lemma_id", sorted(REGISTRY))
    def test_passes_frozen_ceiling(self, lemma_id):
        rep = check(lemma_id, sampler_seed=0, budget=BUDGET, spec=SPEC)
        assert rep.ceiling is not None, f"no frozen ceiling for {lemma_id}"
        assert rep.passed, (
            f"{lemma_id}: range [{rep.min_ratio}, {rep.max_ratio}] "
            f"vs ceiling {rep.ceiling}, excluded={rep.excluded}"
        )


class TestDeterminism:
    def test_identical_reports(self):
        a = check("comp_AB", sampler_seed=42, budget=60, spec=SPEC)
        b = check("comp_AB", sampler_seed=42, budget=60, spec=SPEC)
        assert a == b

    def test_budget_prefix_property(self):
        small = check("cal_3", sampler_seed=7, budget=40, spec=SPEC)
        large = check("cal_3", sampler_seed=7, budget=120, spec=SPEC)
        assert large.max_ratio >= small.max_ratio
        assert large.min_ratio <= small.min_ratio

    def test_seed_changes_samples(self):
        a = check("cal_green", sampler_seed=1, budget=30, spec=SPEC)
        b = check("cal_green", sampler_seed=2, budget=30, spec=SPEC)
        assert (a.min_ratio, a.max_ratio) != (b.min_ratio, b.max_ratio)


class TestToleranceStability:
    @pytest.mark.parametrize("lemma_id", ["cal_green", "two_jump_region", "cal_00"])
    def test_extremes_stable_under_tighter_quadrature(self, lemma_id):
        base = check(lemma_id, sampler_seed=0, budget=60, spec=SPEC)
        tight = check(
            lemma_id,
            sampler_seed=0,
            budget=60,
            spec=QuadratureSpec(rel_tol=SPEC.rel_tol / 2.0, abs_tol=SPEC.abs_tol / 2.0),
        )
        assert base.max_ratio == pytest.approx(tight.max_ratio, rel=0.05)
        assert base.min_ratio == pytest.approx(tight.min_ratio, rel=0.05)


class TestReportInvariants:
    def test_ratio_ordering(self):
        rep = check("kill_log", sampler_seed=3, budget=50, spec=SPEC)
        assert 0.0 < rep.min_ratio <= rep.max_ratio
        assert rep.samples + rep.excluded == 50
        assert rep.argmax  # witnesses recorded

    def test_pass_logic(self):
        good = ComparabilityReport("x", 10, 0, 0.5, 2.0, ceiling=3.0, two_sided=True)
        assert good.passed
        bad_low = ComparabilityReport("x", 10, 0, 0.2, 2.0, ceiling=3.0, two_sided=True)
        assert not bad_low.passed
        one_sided = ComparabilityReport(
            "x", 10, 0, 1e-9, 2.0, ceiling=3.0, two_sided=False
        )
        assert one_sided.passed
        excluded = ComparabilityReport("x", 50, 10, 0.5, 2.0, ceiling=3.0)
        assert not excluded.passed

    def test_invalid_range_rejected(self):
        with pytest.raises(ValueError):
            ComparabilityReport("x", 10, 0, 2.0, 1.0)


class TestSpotValues:
    def test_slowly_varying_at_unit(self):
        # eps = 1, r = 1: log(e+1) about 1.3133 against bound 3
        entry = REGISTRY["slowly_varying"]
        _, hi = entry.evaluate({"eps": 1.0, "r": 1.0}, SPEC)
        assert hi == pytest.approx(math.log(math.e + 1.0) / 3.0, rel=1e-12)

    def test_cal_green_pure_power(self):
        # gamma=2, flat clamps, a=1: both sides equal 1
        entry = REGISTRY["cal_green"]
        lo, hi = entry.evaluate(
            {"gamma": 2.0, "b1": 0.0, "b2": 0.0, "a": 1.0, "k": 1.0, "l": 1.0}, SPEC
        )
        assert hi == pytest.approx(1.0, rel=1e-9)

    def test_cal_3_ratio_tends_to_one(self):
        entry = REGISTRY["cal_3"]
        lo, hi = entry.evaluate({"b1": 0.0, "b2": 0.0, "k": 1e-6, "l": 1e-6}, SPEC)
        # LHS = log(2/l), RHS = log(e + 1/l): ratio close to 1 for tiny l
        assert hi == pytest.approx(1.0, rel=0.1)

    def test_cal_new1_unit_ball(self):
        entry = REGISTRY["cal_new1"]
        _, hi = entry.evaluate({"dim": 1, "xd": 2.0, "A": 1.0}, SPEC)
        lhs = 2.0 * (math.sqrt(3.0) - 1.0)
        assert hi == pytest.approx(lhs / (1.0 * 2.0**-0.5), rel=1e-9)
