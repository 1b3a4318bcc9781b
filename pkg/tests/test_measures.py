"""Tests for Levy measures, jump densities, and pairwise functionals."""

import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from addgap.errors import (
    DivergentIntegral,
    EvaluationAtZero,
    NotAbsolutelyContinuous,
)
from addgap.measures import (
    AbsContinuityReport,
    CompoundPoissonMeasure,
    ExponentialDensity,
    NormalDensity,
    TabulatedDensity,
    TabulatedLevyMeasure,
    TemperedStableMeasure,
    UniformDensity,
    ZeroMeasure,
    check_abs_continuity,
    density_at,
    gamma_nu,
    hellinger_sq,
    l1_distance,
    pair_difference_fn,
    pair_sqrt_difference_fn,
    total_mass,
    validate_levy,
)

from _oracles import (
    ETA_EX3,
    GAMMA_POS_LAM1,
    GAMMA_POS_LAM2,
    H2_EX3,
    H2_EX3_A15,
    L1_EX3,
)

TOL_EXACT = 1e-12
TOL_QUAD = 1e-7
TOL_CLOSED = 1e-9

EX3_NU1 = TemperedStableMeasure(c_minus=1.0, c_plus=1.0, lam_minus=1.0, lam_plus=2.0, alpha=0.5)
EX3_NU2 = TemperedStableMeasure(c_minus=1.0, c_plus=1.0, lam_minus=1.0, lam_plus=1.0, alpha=0.5)

CP_U01 = lambda lam: CompoundPoissonMeasure(lam, UniformDensity(0.0, 1.0))


class TestJumpDensities:
    def test_uniform_pdf_and_support(self):
        d = UniformDensity(-1.0, 3.0)
        y = np.array([-2.0, -1.0, 0.0, 3.0, 3.5])
        np.testing.assert_allclose(d.pdf(y), [0.0, 0.25, 0.25, 0.25, 0.0])
        assert d.support() == (-1.0, 3.0)

    def test_uniform_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            UniformDensity(1.0, 1.0)

    def test_exponential_pdf(self):
        d = ExponentialDensity(2.0)
        assert d.pdf(np.array([-1.0]))[0] == 0.0
        assert abs(d.pdf(np.array([1.0]))[0] - 2.0 * math.exp(-2.0)) < TOL_EXACT

    def test_normal_pdf_peak(self):
        d = NormalDensity(1.0, 4.0)
        peak = 1.0 / math.sqrt(2.0 * math.pi * 4.0)
        assert abs(d.pdf(np.array([1.0]))[0] - peak) < TOL_EXACT

    def test_uniform_sampling_moments(self):
        gen = np.random.default_rng(11)
        x = UniformDensity(2.0, 5.0).sample(gen, 200_000)
        assert abs(x.mean() - 3.5) < 4.0 * math.sqrt(0.75 / 200_000)
        assert x.min() >= 2.0 and x.max() <= 5.0

    def test_exponential_sampling_ks(self):
        gen = np.random.default_rng(12)
        x = ExponentialDensity(3.0).sample(gen, 100_000)
        assert stats.kstest(x, stats.expon(scale=1.0 / 3.0).cdf).pvalue > 1e-3

    def test_normal_sampling_ks(self):
        gen = np.random.default_rng(13)
        x = NormalDensity(-1.0, 0.25).sample(gen, 100_000)
        assert stats.kstest(x, stats.norm(loc=-1.0, scale=0.5).cdf).pvalue > 1e-3


class TestTabulatedDensity:
    def triangular(self):
        return TabulatedDensity((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))

    def test_pdf_interpolates(self):
        d = self.triangular()
        y = np.array([-0.5, 0.5, 1.0, 1.5, 2.5])
        np.testing.assert_allclose(d.pdf(y), [0.0, 0.5, 1.0, 0.5, 0.0], atol=TOL_EXACT)

    def test_requires_unit_mass(self):
        with pytest.raises(ValueError):
            TabulatedDensity((0.0, 1.0), (1.0, 3.0))

    def test_requires_sorted_grid(self):
        with pytest.raises(ValueError):
            TabulatedDensity((1.0, 0.0, 2.0), (0.0, 1.0, 0.0))

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            TabulatedDensity((0.0, 1.0, 2.0), (0.5, -0.1, 1.1))

    def test_sampling_matches_cdf(self):
        gen = np.random.default_rng(21)
        x = self.triangular().sample(gen, 100_000)

        def cdf(t):
            t = np.asarray(t, dtype=float)
            return np.where(t < 1.0, 0.5 * t**2, 1.0 - 0.5 * (2.0 - t) ** 2)

        assert stats.kstest(x, cdf).pvalue > 1e-3
        assert ((x >= 0.0) & (x <= 2.0)).all()

    def test_sampling_concentrated_cell(self):
        width = 1e-6
        grid = (0.999999, 1.0, 1.0 + width, 1.000002)
        values = (0.0, 0.5e6, 0.5e6, 0.0)
        d = TabulatedDensity(grid, values)
        gen = np.random.default_rng(22)
        x = d.sample(gen, 100_000)
        assert ((x >= grid[0]) & (x <= grid[-1])).all()
        frac = ((x >= 1.0) & (x <= 1.0 + width)).mean()
        assert abs(frac - 0.5) < 4.0 * math.sqrt(0.25 / 100_000)


class TestDensityEvaluation:
    def test_tempered_stable_point_value(self):
        nu = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 0.5)
        assert abs(density_at(nu, 1.0) - math.exp(-1.0)) < TOL_EXACT

    def test_compound_poisson_point_value(self):
        assert abs(density_at(CP_U01(2.0), 0.5) - 2.0) < TOL_EXACT

    def test_zero_rejected(self):
        with pytest.raises(EvaluationAtZero):
            density_at(CP_U01(1.0), 0.0)

    def test_tempered_stable_sides(self):
        nu = TemperedStableMeasure(c_minus=3.0, c_plus=1.0, lam_minus=2.0, lam_plus=1.0, alpha=0.5)
        got = density_at(nu, -0.5)
        expect = 3.0 * 0.5 ** (-1.5) * math.exp(-1.0)
        assert abs(got - expect) < TOL_EXACT * expect

    def test_log_density_consistent(self):
        nu = TemperedStableMeasure(1.0, 2.0, 1.0, 3.0, 0.5)
        y = np.array([-2.0, -0.1, 0.3, 1.7])
        np.testing.assert_allclose(nu.log_density(y), np.log(nu.density(y)), rtol=1e-13)

    def test_density_zero_at_origin(self):
        for nu in (EX3_NU1, CP_U01(1.0), ZeroMeasure()):
            assert nu.density(np.array([0.0]))[0] == 0.0


class TestTotalMass:
    def test_zero(self):
        assert total_mass(ZeroMeasure()) == 0.0

    def test_compound_poisson_exact(self):
        assert total_mass(CP_U01(2.0)) == 2.0

    def test_tempered_stable_finite_activity(self):
        nu = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, -0.5)
        expect = 2.0 * math.gamma(0.5)
        assert abs(total_mass(nu) - expect) < TOL_QUAD * expect

    def test_tempered_stable_infinite_activity(self):
        assert total_mass(EX3_NU1) == math.inf
        assert not EX3_NU1.is_finite_activity()

    def test_mass_above_compound_poisson(self):
        assert abs(CP_U01(2.0).mass_above(0.5) - 1.0) < TOL_CLOSED

    def test_mass_above_tempered_stable(self):
        nu = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 0.5)
        eps = 1e-4
        expect = 2.0 * float(mpmath.gammainc(-0.5, eps))
        assert abs(nu.mass_above(eps) - expect) < TOL_QUAD * expect

    def test_mass_above_zero_epsilon_is_total(self):
        assert CP_U01(3.0).mass_above(0.0) == 3.0
        assert EX3_NU1.mass_above(0.0) == math.inf


class TestGamma:
    def test_compound_poisson_uniform(self):
        assert abs(gamma_nu(CP_U01(3.0)) - 1.5) < TOL_CLOSED

    def test_zero_measure(self):
        assert gamma_nu(ZeroMeasure()) == 0.0

    def test_symmetric_tempered_stable(self):
        assert abs(gamma_nu(EX3_NU2)) < 1e-10

    def test_asymmetric_tempered_stable(self):
        expect = GAMMA_POS_LAM2 - GAMMA_POS_LAM1
        assert abs(gamma_nu(EX3_NU1) - expect) < TOL_QUAD * abs(expect)
        assert abs(expect - ETA_EX3) < TOL_EXACT

    def test_symmetric_normal_jumps(self):
        nu = CompoundPoissonMeasure(2.0, NormalDensity(0.0, 1.0))
        assert abs(gamma_nu(nu)) < 1e-10

    def test_divergent_for_alpha_above_one(self):
        nu = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 1.5)
        with pytest.raises(DivergentIntegral):
            gamma_nu(nu)

    def test_jumps_clipped_to_unit_ball(self):
        # jumps supported on [2, 3] contribute nothing
        nu = CompoundPoissonMeasure(5.0, UniformDensity(2.0, 3.0))
        assert gamma_nu(nu) == 0.0


class TestAbsoluteContinuity:
    def test_nested_supports_ok(self):
        rep = check_abs_continuity(CP_U01(2.0), CP_U01(4.0))
        assert isinstance(rep, AbsContinuityReport)
        assert rep.ok and not rep.violations

    def test_wider_support_fails(self):
        wide = CompoundPoissonMeasure(1.0, UniformDensity(0.0, 2.0))
        rep = check_abs_continuity(wide, CP_U01(1.0))
        assert not rep.ok
        assert all(1.0 < v <= 2.0 for v in rep.violations)

    def test_zero_measure_dominated_by_anything(self):
        assert check_abs_continuity(ZeroMeasure(), ZeroMeasure()).ok
        assert check_abs_continuity(ZeroMeasure(), CP_U01(1.0)).ok

    def test_positive_measure_not_dominated_by_zero(self):
        assert not check_abs_continuity(CP_U01(1.0), ZeroMeasure()).ok

    def test_tabulated_knots_probed(self):
        grid = tuple(np.logspace(-2.0, 1.0, 50))
        vals = tuple(1.0 / g**2 for g in grid)
        tab = TabulatedLevyMeasure(grid, vals)
        narrow = TabulatedLevyMeasure(grid[10:40], vals[10:40])
        assert check_abs_continuity(narrow, tab).ok
        rep = check_abs_continuity(tab, narrow)
        assert not rep.ok

    def test_opposite_sides_fail(self):
        pos = CompoundPoissonMeasure(1.0, UniformDensity(0.5, 1.0))
        neg = CompoundPoissonMeasure(1.0, UniformDensity(-1.0, -0.5))
        assert not check_abs_continuity(pos, neg).ok


class TestL1Distance:
    def test_compound_poisson_shared_density(self):
        assert abs(l1_distance(CP_U01(2.0), CP_U01(1.0)) - 1.0) < TOL_CLOSED

    def test_identical_measures(self):
        assert abs(l1_distance(EX3_NU1, EX3_NU1)) < TOL_EXACT

    def test_zero_vs_compound_poisson(self):
        assert abs(l1_distance(ZeroMeasure(), CP_U01(2.5)) - 2.5) < TOL_CLOSED

    def test_tempered_stable_pair(self):
        got = l1_distance(EX3_NU1, EX3_NU2)
        assert abs(got - L1_EX3) < TOL_QUAD * L1_EX3

    def test_divergent_for_alpha_above_one(self):
        nu1 = TemperedStableMeasure(1.0, 1.0, 1.0, 2.0, 1.5)
        nu2 = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 1.5)
        assert l1_distance(nu1, nu2) == math.inf

    def test_requires_absolute_continuity(self):
        wide = CompoundPoissonMeasure(1.0, UniformDensity(0.0, 2.0))
        with pytest.raises(NotAbsolutelyContinuous):
            l1_distance(wide, CP_U01(1.0))

    def test_mixed_families(self):
        # CP(2, U(0,1)) against CP(1, Exp(1)): both have positive density
        # on (0, 1]; the exponential extends beyond. |n1 - n2| integrates to
        # a value computable by direct quadrature of the absolute gap.
        cp = CP_U01(2.0)
        ce = CompoundPoissonMeasure(1.0, ExponentialDensity(1.0))
        got = l1_distance(cp, ce)
        xs = np.linspace(1e-9, 1.0, 2_000_001)
        inner = np.trapezoid(np.abs(2.0 - np.exp(-xs)), xs)
        outer = math.exp(-1.0)
        assert abs(got - (inner + outer)) < 1e-6


class TestHellinger:
    def test_compound_poisson_shared_density(self):
        got = hellinger_sq(CP_U01(4.0), CP_U01(1.0))
        assert abs(got - 1.0) < TOL_CLOSED

    def test_compound_poisson_closed_form(self):
        lam1, lam2 = 2.7, 0.4
        got = hellinger_sq(CP_U01(lam1), CP_U01(lam2))
        expect = (math.sqrt(lam1) - math.sqrt(lam2)) ** 2
        assert abs(got - expect) < TOL_CLOSED

    def test_tempered_stable_pair(self):
        got = hellinger_sq(EX3_NU1, EX3_NU2)
        assert abs(got - H2_EX3) < TOL_QUAD * H2_EX3

    def test_finite_when_l1_diverges(self):
        nu1 = TemperedStableMeasure(1.0, 1.0, 1.0, 2.0, 1.5)
        nu2 = TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 1.5)
        got = hellinger_sq(nu1, nu2)
        assert math.isfinite(got)
        assert abs(got - H2_EX3_A15) < TOL_QUAD * H2_EX3_A15

    def test_bounded_by_l1(self):
        pairs = [
            (CP_U01(2.0), CP_U01(1.0)),
            (EX3_NU1, EX3_NU2),
            (
                CP_U01(2.0),
                CompoundPoissonMeasure(1.0, ExponentialDensity(1.0)),
            ),
        ]
        for nu1, nu2 in pairs:
            assert hellinger_sq(nu1, nu2) <= l1_distance(nu1, nu2) + 1e-12


class TestValidateLevy:
    def test_zero(self):
        rep = validate_levy(ZeroMeasure())
        assert rep.ok and rep.value == 0.0

    def test_compound_poisson_value(self):
        rep = validate_levy(CP_U01(2.0))
        assert rep.ok
        assert abs(rep.value - 2.0 / 3.0) < TOL_CLOSED

    def test_tempered_stable_value(self):
        rep = validate_levy(TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 0.5))
        inner = float(mpmath.gammainc(1.5, 0, 1))
        outer = float(mpmath.gammainc(-0.5, 1))
        expect = 2.0 * (inner + outer)
        assert rep.ok
        assert abs(rep.value - expect) < TOL_QUAD * expect

    def test_alpha_close_to_two_still_valid(self):
        rep = validate_levy(TemperedStableMeasure(1.0, 1.0, 1.0, 1.0, 1.9))
        assert rep.ok and math.isfinite(rep.value)

    def test_tabulated_steep_inner_trend_fails(self):
        grid = tuple(np.logspace(-6, 1, 200))
        vals = tuple(g**-3.0 for g in grid)
        rep = validate_levy(TabulatedLevyMeasure(grid, vals))
        assert not rep.ok
        assert rep.message

    def test_tabulated_mild_inner_trend_ok(self):
        grid = tuple(np.logspace(-6, 1, 200))
        vals = tuple(g**-0.5 * math.exp(-g) for g in grid)
        rep = validate_levy(TabulatedLevyMeasure(grid, vals))
        assert rep.ok and math.isfinite(rep.value)


class TestTabulatedLevyMeasure:
    def test_log_linear_reproduces_power_law(self):
        grid = tuple(np.logspace(-3, 1, 40))
        vals = tuple(2.0 * g**-1.5 for g in grid)
        tab = TabulatedLevyMeasure(grid, vals)
        mids = np.sqrt(np.asarray(grid[:-1]) * np.asarray(grid[1:]))
        np.testing.assert_allclose(tab.density(mids), 2.0 * mids**-1.5, rtol=1e-12)

    def test_zero_outside_knots(self):
        tab = TabulatedLevyMeasure((0.1, 1.0), (1.0, 1.0))
        y = np.array([-1.0, 0.05, 2.0])
        assert (tab.density(y) == 0.0).all()

    def test_two_sided(self):
        grid = (-2.0, -0.5, 0.5, 2.0)
        vals = (1.0, 2.0, 3.0, 4.0)
        tab = TabulatedLevyMeasure(grid, vals)
        assert abs(tab.density(np.array([-2.0]))[0] - 1.0) < TOL_EXACT
        assert abs(tab.density(np.array([0.5]))[0] - 3.0) < TOL_EXACT
        assert tab.support_segments() == ((-2.0, -0.5), (0.5, 2.0))

    def test_rejects_zero_knot(self):
        with pytest.raises(ValueError):
            TabulatedLevyMeasure((-1.0, 0.0, 1.0), (1.0, 1.0, 1.0))

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError):
            TabulatedLevyMeasure((0.1, 1.0), (1.0, 0.0))

    def test_rejects_single_knot_side(self):
        with pytest.raises(ValueError):
            TabulatedLevyMeasure((-1.0, 0.5, 1.0), (1.0, 1.0, 1.0))

    def test_truncated_mass_matches_quadrature(self):
        grid = tuple(np.logspace(-2, 1, 60))
        vals = tuple(g**-0.5 * math.exp(-g) for g in grid)
        tab = TabulatedLevyMeasure(grid, vals)
        # inner knot 1e-2 >= 1e-3: no extrapolation, plain truncated mass
        assert tab.is_finite_activity()
        mass = tab.total_mass()
        ys = np.logspace(-2, 1, 3_000_001)
        ref = np.trapezoid(tab.density(ys), ys)
        assert abs(mass - ref) < 1e-6 * ref

    def test_breakpoints_subsampled(self):
        grid = tuple(np.logspace(-3, 1, 500))
        vals = tuple(g**-1.0 for g in grid)
        tab = TabulatedLevyMeasure(grid, vals)
        assert len(tab.breakpoints()) <= 33

    def test_infinite_mass_flag_from_inner_trend(self):
        grid = tuple(np.logspace(-6, 0, 100))
        vals = tuple(g**-1.5 for g in grid)
        tab = TabulatedLevyMeasure(grid, vals)
        assert tab.total_mass() == math.inf
        assert not tab.is_finite_activity()


class TestPairHooks:
    def test_tempered_stable_difference_cancellation(self):
        lam1, lam2 = 1.0, 1.0 + 1e-9
        nu1 = TemperedStableMeasure(1.0, 1.0, lam1, lam1, 0.5)
        nu2 = TemperedStableMeasure(1.0, 1.0, lam2, lam2, 0.5)
        diff = pair_difference_fn(nu1, nu2)
        y = 1e-6
        got = float(diff(np.array([y]))[0])
        with mpmath.workdps(50):
            my = mpmath.mpf(y)
            expect = float(
                mpmath.power(my, -1.5)
                * (mpmath.exp(-mpmath.mpf(lam1) * my) - mpmath.exp(-mpmath.mpf(lam2) * my))
            )
        assert abs(got - expect) < 1e-12 * abs(expect)

    def test_tempered_stable_sqrt_difference_cancellation(self):
        lam1, lam2 = 2.0, 2.0 + 1e-8
        nu1 = TemperedStableMeasure(1.0, 1.0, lam1, lam1, 0.5)
        nu2 = TemperedStableMeasure(1.0, 1.0, lam2, lam2, 0.5)
        sdiff = pair_sqrt_difference_fn(nu1, nu2)
        y = 1e-5
        got = float(sdiff(np.array([y]))[0])
        with mpmath.workdps(50):
            my = mpmath.mpf(y)
            expect = float(
                mpmath.sqrt(mpmath.power(my, -1.5))
                * (
                    mpmath.exp(-mpmath.mpf(lam1) * my / 2)
                    - mpmath.exp(-mpmath.mpf(lam2) * my / 2)
                )
            )
        assert abs(got - expect) < 1e-12 * abs(expect)

    def test_generic_difference_matches_densities(self):
        cp = CP_U01(2.0)
        ce = CompoundPoissonMeasure(1.0, ExponentialDensity(1.0))
        diff = pair_difference_fn(cp, ce)
        y = np.array([0.25, 0.75, 1.5])
        np.testing.assert_allclose(diff(y), cp.density(y) - ce.density(y), rtol=1e-13)

    def test_measures_hashable(self):
        assert EX3_NU1 == TemperedStableMeasure(1.0, 1.0, 1.0, 2.0, 0.5)
        d = {EX3_NU1: "a", EX3_NU2: "b", ZeroMeasure(): "c"}
        assert d[TemperedStableMeasure(1.0, 1.0, 1.0, 2.0, 0.5)] == "a"
