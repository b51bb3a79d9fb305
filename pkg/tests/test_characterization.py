import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnormal import (
    DomainError,
    FFamily,
    GFunction1D,
    MomentSummary,
    ScanConfig,
    ScenarioSet,
    SublinearDistribution,
    ValidationError,
    canonical_family,
    comb_law,
    contradiction_probe_means,
    invariance_scan,
    mean_lower,
    mean_upper,
    moment_summary,
    solve_f_family,
    variance_identity,
    verify_theorem1,
    verify_theorem2,
)

from conftest import brute_nested_expect

FAMILY = canonical_family(1.0)


class TestFFamily:
    def test_requires_positive_parameters(self):
        with pytest.raises(ValidationError):
            FFamily(0.0, 1.0)
        with pytest.raises(ValidationError):
            FFamily(1.0, -2.0)

    def test_domain_and_endpoints(self):
        fam = FFamily(1.0, 4.0)
        assert fam.domain == (-0.5, 0.5)
        assert fam(0.0) == 1.0
        assert fam(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_outside_domain_raises(self):
        with pytest.raises(DomainError):
            FFamily(1.0, 1.0)(1.5)

    @given(
        st.floats(0.1, 10.0),
        st.floats(0.1, 10.0),
        st.floats(-1.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_algebraic_identity(self, a, b, frac):
        fam = FFamily(a, b)
        lam = frac * math.sqrt(a / b)
        assert lam * lam * b + fam(lam) ** 2 == pytest.approx(a, rel=1e-12, abs=1e-12)


class TestMeanFormulas:
    MS = MomentSummary(2.0, 1.0, 9.0, 4.0)

    def test_positive_lambda_instance(self):
        got = mean_upper(0.5, math.sqrt(0.75), self.MS, self.MS)
        assert got == pytest.approx(math.sqrt(0.75) * 2 + 0.5 * 2)

    def test_negative_lambda_symmetric_means(self):
        ms = MomentSummary(1.0, -1.0, 4.0, 1.0)
        # f(-a) = 1 - a with a = 0.3 reproduces the upper mean exactly
        assert mean_upper(-0.3, 0.7, ms, ms) == pytest.approx(1.0)
        assert mean_lower(-0.3, 0.7, ms, ms) == pytest.approx(-1.0)

    def test_lambda_zero_reads_off_y(self):
        assert mean_upper(0.0, 1.0, self.MS, self.MS) == self.MS.mu_bar
        assert mean_lower(0.0, 1.0, self.MS, self.MS) == self.MS.mu_low

    def test_duality_under_negation(self):
        ms = MomentSummary(1.5, -0.5, 9.0, 1.0)
        neg = MomentSummary(0.5, -1.5, 9.0, 1.0)  # moments of -X
        for lam in (-0.8, -0.2, 0.0, 0.4, 0.9):
            f = 0.3
            assert mean_lower(lam, f, ms, ms) == pytest.approx(
                -mean_upper(lam, f, neg, neg), abs=1e-12
            )

    @given(
        st.floats(-0.95, 0.95),
        st.lists(st.floats(-2, 2), min_size=2, max_size=2),
        st.lists(st.floats(-2, 2), min_size=2, max_size=2),
    )
    @settings(max_examples=100, deadline=None)
    def test_formulas_match_brute_force_composition(self, lam, ax, ay):
        f = math.sqrt(1 - lam * lam)
        mx = [[(ax[0], 0.5), (ax[1], 0.5)], [(2 * ax[0], 1.0)]]
        my = [[(ay[0], 0.25), (ay[1], 0.75)]]
        ms_x = moment_summary(ScenarioSet(mx))
        ms_y = moment_summary(ScenarioSet(my))
        want_upper = brute_nested_expect(mx, my, lambda x, y: lam * x + f * y)
        want_lower = -brute_nested_expect(mx, my, lambda x, y: -(lam * x + f * y))
        assert mean_upper(lam, f, ms_x, ms_y) == pytest.approx(want_upper, abs=1e-12)
        assert mean_lower(lam, f, ms_x, ms_y) == pytest.approx(want_lower, abs=1e-12)


class TestVarianceIdentity:
    def test_unit_combination(self):
        assert variance_identity(0.6, 0.8, 1.0, 1.0) == pytest.approx(1.0)

    def test_lambda_zero_scales_y(self):
        a = 2.5
        assert variance_identity(0.0, math.sqrt(a), 1.0, 0.7) == pytest.approx(a * 0.7)

    def test_rejects_negative_moments(self):
        with pytest.raises(ValidationError):
            variance_identity(0.5, 0.5, -1.0, 1.0)

    def test_matches_nested_pde_second_moment(self, gnormal_half):
        lam, f = 0.6, 0.8
        law = comb_law(gnormal_half, gnormal_half, lam, f)
        want = variance_identity(lam, f, 1.0, 1.0)
        assert law.expect(lambda v: v * v) == pytest.approx(want, abs=5e-3)


class TestSolveFFamily:
    ZERO = MomentSummary(0.0, 0.0, 1.0, 0.25)

    def test_quarter_variance_target(self):
        ms_y = MomentSummary(0.0, 0.0, 0.25, 0.0625)
        fam = solve_f_family(self.ZERO, ms_y, 0.25)
        assert fam.a == pytest.approx(1.0)
        assert fam.b == pytest.approx(4.0)
        assert fam.domain == (pytest.approx(-0.5), pytest.approx(0.5))

    def test_identity_target_recovers_unit_family(self):
        fam = solve_f_family(self.ZERO, self.ZERO, self.ZERO.var_bar)
        assert (fam.a, fam.b) == (1.0, 1.0)
        assert fam(0.5) == pytest.approx(math.sqrt(0.75))

    def test_scaled_target(self):
        fam = solve_f_family(self.ZERO, self.ZERO, 4.0 * self.ZERO.var_bar)
        assert (fam.a, fam.b) == (4.0, 1.0)
        assert fam(0.0) == 2.0

    def test_nonzero_means_rejected(self):
        bad = MomentSummary(0.1, 0.1, 1.0, 1.0)
        with pytest.raises(ValidationError, match="zero means"):
            solve_f_family(bad, self.ZERO, 1.0)

    def test_degenerate_y_rejected(self):
        flat = MomentSummary(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValidationError, match="degenerate"):
            solve_f_family(self.ZERO, flat, 1.0)


class TestInvarianceScan:
    def test_lambda_zero_only_against_itself(self, gnormal_half):
        ref = comb_law(gnormal_half, gnormal_half, 0.0, 1.0)
        report = invariance_scan(
            gnormal_half, gnormal_half, FFamily(1.0, 1.0), [0.0], FAMILY, ref
        )
        assert report.max_deviation <= 5e-3

    def test_out_of_domain_lambdas_are_skipped(self, gnormal_half):
        report = invariance_scan(
            gnormal_half,
            gnormal_half,
            FFamily(1.0, 1.0),
            [0.0, 2.0, -3.0],
            FAMILY,
            gnormal_half,
        )
        assert report.lambdas == (0.0,)
        assert set(report.skipped) == {2.0, -3.0}

    def test_empty_usable_grid_raises(self, gnormal_half):
        with pytest.raises(DomainError):
            invariance_scan(
                gnormal_half, gnormal_half, FFamily(1.0, 1.0), [5.0], FAMILY,
                gnormal_half,
            )

    def test_deviations_invariant_under_joint_negation(self, gnormal_half):
        fam = FFamily(1.0, 1.0)
        lambdas = [0.5, -0.5]
        base = invariance_scan(
            gnormal_half, gnormal_half, fam, lambdas, FAMILY, gnormal_half
        )
        # G-normal is symmetric: replacing (X, Y) by (-X, -Y) is invisible
        from gnormal import affine_image

        neg = affine_image(gnormal_half, -1.0)
        flipped = invariance_scan(neg, neg, fam, lambdas, FAMILY, neg)
        for d1, d2 in zip(base.deviations, flipped.deviations):
            assert d1 == pytest.approx(d2, abs=1e-10)


class TestVerifyTheorem1:
    def test_passes_for_default_band(self, band):
        report = verify_theorem1(band)
        assert report.passed
        assert report.checks["mean_ok"]

    def test_passes_for_classical_normal(self):
        report = verify_theorem1(GFunction1D(1.0, 1.0))
        assert report.passed

    def test_two_point_scenario_fails_converse(self, band):
        x = SublinearDistribution.from_scenarios(
            ScenarioSet.symmetric_two_point([1.0, 0.5])
        )
        report = verify_theorem1(band, dist_x=x)
        assert not report.passed
        # margin frozen from the exact enumeration run
        assert report.scan.max_deviation == pytest.approx(0.25, abs=1e-9)
        assert report.scan.max_deviation >= 10 * report.threshold

    def test_wrong_f_fails_with_margin(self, band):
        report = verify_theorem1(band, f_override=lambda lam: 1.0 - abs(lam))
        assert not report.passed
        assert report.scan.max_deviation >= 10 * report.threshold


class TestVerifyTheorem2:
    def test_passes_for_quarter_ratio(self, band):
        report = verify_theorem2(band, a=1.0, b=4.0)
        assert report.passed
        assert report.checks["lambda_domain"] == (pytest.approx(-0.5), pytest.approx(0.5))
        assert report.checks["endpoint_deviation"] <= report.threshold
        assert max(report.checks["rescaling_deviations"]) <= report.threshold

    def test_unit_parameters_reduce_to_theorem1(self, band):
        report = verify_theorem2(band, a=1.0, b=1.0)
        assert report.passed

    def test_wrong_y_variance_ratio_fails(self, band):
        # b = 4 demands sigma_Y = sigma_X / 2; an unscaled Y breaks the scan
        report = verify_theorem2(band, a=1.0, b=4.0, y_band=band)
        assert not report.passed
        assert report.scan.max_deviation >= 10 * report.threshold


class TestContradictionProbe:
    def test_unequal_means_branch(self):
        ms = MomentSummary(1.0, -1.0, 4.0, 1.0)
        rep = contradiction_probe_means(ms, 0.5)
        assert rep.branch == "mu_bar != mu_low"
        assert rep.f_value == 0.5
        assert rep.contradiction
        assert rep.lhs == pytest.approx(0.5 * 4.0)

    def test_consistent_moments_fire_nothing(self):
        rep = contradiction_probe_means(MomentSummary(0.0, 0.0, 1.0, 0.25))
        assert rep.branch == "consistent"
        assert not rep.contradiction

    def test_equal_nonzero_means_branch(self):
        rep = contradiction_probe_means(MomentSummary(1.0, 1.0, 1.0, 1.0), 0.5)
        assert rep.branch == "mu_bar = mu_low != 0"
        assert rep.lhs == pytest.approx(0.5)
        assert rep.rhs == pytest.approx(0.5)
        assert rep.contradiction

    def test_alpha_domain(self):
        with pytest.raises(ValidationError):
            contradiction_probe_means(MomentSummary(0, 0, 1, 1), 1.5)
