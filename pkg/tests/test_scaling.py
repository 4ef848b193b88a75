import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radarlab.errors import (
    ConfigurationError,
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NoFiniteAsymptoteError,
    UnsupportedExponentError,
)
from radarlab.scaling import (
    CityGrowthParams,
    GrowthParams,
    PowerLaw,
    asymptotic_mass,
    city_asymptote,
    city_growth,
    growth_analytic,
    growth_time_scale,
    integrate_growth,
    interaction_count,
    linear_fit,
    loglog_fit,
    power_eval,
)


def bernoulli_crossing_time(a, b, gamma, n0, level):
    """Time at which the exact solution of dn/dt = a n^g - b n reaches ``level``.

    w = n^(1-g) obeys dw/dt = (1-g)(a - b w), so w(t) = a/b + (w0 - a/b) e^{-(1-g) b t}.
    """
    k = 1.0 - gamma
    w0, wl = n0**k, level**k
    return math.log((wl - a / b) / (w0 - a / b)) / (-k * b)


class TestPowerLaw:
    def test_three_quarter_at_16(self):
        assert power_eval(PowerLaw(1.0, 0.75), 16) == pytest.approx(8.0, rel=1e-15)

    def test_zero_exponent(self):
        assert power_eval(PowerLaw(2.0, 0.0), 99) == 2.0

    def test_hundredfold_mass_thirtyfold_rate(self):
        assert power_eval(PowerLaw(1.0, 0.75), 100) == pytest.approx(31.62, abs=0.005)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_nonpositive_x(self, x):
        with pytest.raises(DomainError):
            power_eval(PowerLaw(1.0, 0.75), x)

    def test_nonpositive_coefficient(self):
        with pytest.raises(DomainError):
            PowerLaw(0.0, 1.0)

    def test_array_input(self):
        np.testing.assert_allclose(power_eval(PowerLaw(3.0, 2.0), [1.0, 2.0]), [3.0, 12.0])


class TestAsymptote:
    @pytest.mark.parametrize(
        "a,b,p,expected",
        [(1, 1, 0.75, 1.0), (1, 0.5, 0.75, 16.0), (3, 1, 2 / 3, 27.0)],
    )
    def test_examples(self, a, b, p, expected):
        assert asymptotic_mass(GrowthParams(a, b, p)) == pytest.approx(expected, rel=1e-12)

    def test_superlinear_has_no_asymptote(self):
        with pytest.raises(NoFiniteAsymptoteError):
            asymptotic_mass(GrowthParams(1, 1, 1.0))

    @given(
        a=st.floats(0.01, 100),
        b=st.floats(0.01, 100),
        p=st.floats(0.05, 0.95),
    )
    def test_fixed_point(self, a, b, p):
        M = asymptotic_mass(GrowthParams(a, b, p))
        intake = a * power_eval(PowerLaw(1.0, p), M)
        assert intake == pytest.approx(b * M, rel=1e-12)


class TestGrowthIntegration:
    def test_fixed_point_is_constant(self):
        params = GrowthParams(1.0, 0.5, 0.75, m0=16.0)
        traj = integrate_growth(params, 10.0, 0.01)
        np.testing.assert_allclose(traj.value, 16.0, rtol=1e-14)

    def test_reaches_asymptote(self):
        params = GrowthParams(1.0, 0.5, 0.75, m0=1.0)
        traj = integrate_growth(params, 200.0, 0.01)
        assert traj.value[-1] == pytest.approx(16.0, rel=1e-3)
        assert np.all(np.diff(traj.value) >= 0)

    def test_last_sample_lands_on_t_end(self):
        traj = integrate_growth(GrowthParams(1.0, 0.5), 1.0, 0.3)
        assert traj.t[-1] == 1.0
        assert len(traj.t) == 5

    def test_dt_not_smaller_than_t_end(self):
        with pytest.raises(ConfigurationError):
            integrate_growth(GrowthParams(1.0, 0.5), 1.0, 1.0)

    def test_csv_header(self, tmp_path):
        traj = integrate_growth(GrowthParams(1.0, 0.5), 1.0, 0.5)
        path = traj.to_csv(tmp_path / "g.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "t,value"
        assert len(lines) == 4

    def test_invalid_params(self):
        with pytest.raises(ConfigurationError):
            GrowthParams(-1.0, 1.0)


class TestGrowthAnalytic:
    def test_initial_condition(self):
        params = GrowthParams(1.0, 0.5, 0.75, m0=2.5)
        assert growth_analytic(params, 0.0) == pytest.approx(2.5, rel=1e-14)

    def test_long_time_limit(self):
        params = GrowthParams(2.0, 0.5, 0.75, m0=2.5)
        assert growth_analytic(params, 1e4) == pytest.approx(256.0, rel=1e-12)

    def test_rejects_other_exponents(self):
        with pytest.raises(UnsupportedExponentError):
            growth_analytic(GrowthParams(1.0, 1.0, 2 / 3), 1.0)

    def test_closed_form_against_fine_integration(self):
        # the closed form is only trusted as an oracle once a very fine RK4 agrees
        params = GrowthParams(1.3, 0.4, 0.75, m0=0.2)
        ts = growth_time_scale(params)
        traj = integrate_growth(params, 3 * ts, 1e-4 * ts)
        np.testing.assert_allclose(traj.value, growth_analytic(params, traj.t), rtol=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(
        a=st.floats(0.1, 10),
        b=st.floats(0.1, 10),
        frac=st.floats(0.001, 0.999),
    )
    def test_integrator_matches_closed_form(self, a, b, frac):
        M = (a / b) ** 4
        params = GrowthParams(a, b, 0.75, m0=frac * M)
        ts = growth_time_scale(params)
        traj = integrate_growth(params, 5 * ts, 1e-3 * ts)
        idx = np.linspace(0, len(traj.t) - 1, 100).astype(int)
        exact = growth_analytic(params, traj.t[idx])
        np.testing.assert_allclose(traj.value[idx], exact, rtol=1e-6)

    @settings(max_examples=10, deadline=None)
    @given(a=st.floats(0.1, 10), b=st.floats(0.1, 10), frac=st.floats(0.01, 0.99))
    def test_halving_step_invariance(self, a, b, frac):
        params = GrowthParams(a, b, 0.75, m0=frac * (a / b) ** 4)
        ts = growth_time_scale(params)
        coarse = integrate_growth(params, 2 * ts, 2e-3 * ts)
        fine = integrate_growth(params, 2 * ts, 1e-3 * ts)
        np.testing.assert_allclose(coarse.value, fine.value[::2], rtol=1e-6)


class TestCityGrowth:
    def test_three_quarter_reduces_to_growth_equation(self):
        city = city_growth(CityGrowthParams(1.0, 0.5, 0.75, 1.0), 200.0, 0.01)
        assert city.blow_up is None
        assert city.value[-1] == pytest.approx(16.0, rel=1e-3)
        assert city_asymptote(CityGrowthParams(1.0, 0.5, 0.75, 1.0)) == pytest.approx(16.0)

    def test_linear_balanced_is_constant(self):
        city = city_growth(CityGrowthParams(0.7, 0.7, 1.0, 5.0), 10.0, 0.01)
        np.testing.assert_allclose(city.value, 5.0, rtol=1e-14)
        assert city.blow_up is None

    def test_superlinear_blow_up_refinement(self):
        params = CityGrowthParams(1.0, 0.1, 1.2, 10.0)
        coarse = city_growth(params, 10.0, 1e-3)
        fine = city_growth(params, 10.0, 1e-4)
        assert coarse.blow_up is not None and fine.blow_up is not None
        assert coarse.blow_up == pytest.approx(fine.blow_up, rel=0.01)
        exact = bernoulli_crossing_time(1.0, 0.1, 1.2, 10.0, 1e13)
        assert fine.blow_up == pytest.approx(exact, rel=1e-3)

    def test_superlinear_below_threshold_decays(self):
        # a n0^(g-1) < b: maintenance wins, no blow-up
        params = CityGrowthParams(0.1, 1.0, 1.2, 1.0)
        traj = city_growth(params, 5.0, 0.01)
        assert traj.blow_up is None
        assert traj.value[-1] < 1.0

    def test_no_asymptote_for_superlinear(self):
        with pytest.raises(NoFiniteAsymptoteError):
            city_asymptote(CityGrowthParams(1.0, 0.1, 1.2, 10.0))


class TestLogLogFit:
    def test_exact_square(self):
        fit = loglog_fit([1, 2, 4, 8], [1, 4, 16, 64])
        assert fit.slope == pytest.approx(2.0, abs=1e-14)
        assert fit.r_squared == 1.0
        assert fit.slope_stderr == 0.0
        assert fit.p_value is None

    def test_constant(self):
        fit = loglog_fit([1, 2, 3, 4], [5, 5, 5, 5])
        assert fit.slope == 0.0

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            loglog_fit([1, 2], [1, 2])

    def test_nonpositive(self):
        with pytest.raises(DomainError):
            loglog_fit([1, 2, 0], [1, 2, 3])
        with pytest.raises(DomainError):
            loglog_fit([1, 2, 3], [1, -2, 3])

    def test_zero_x_variance(self):
        with pytest.raises(DegenerateFitError):
            loglog_fit([3, 3, 3], [1, 2, 3])

    def test_p_value_matches_scipy(self):
        from scipy import stats

        rng = np.random.default_rng(3)
        x = rng.uniform(1, 10, 20)
        y = rng.uniform(1, 10, 20)
        fit = loglog_fit(x, y)
        ref = stats.linregress(np.log(x), np.log(y))
        assert fit.slope == pytest.approx(ref.slope, rel=1e-12)
        assert fit.slope_stderr == pytest.approx(ref.stderr, rel=1e-10)
        assert fit.p_value == pytest.approx(ref.pvalue, rel=1e-8)
        assert fit.r_squared == pytest.approx(ref.rvalue**2, rel=1e-10)

    def test_known_exponent_coverage(self):
        hits = 0
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            x = rng.uniform(1, 1000, 50)
            y = 5 * x**0.75 * np.exp(rng.normal(0, 0.05, 50))
            fit = loglog_fit(x, y)
            hits += abs(fit.slope - 0.75) <= 3 * fit.slope_stderr
        assert hits >= 990

    @given(
        c=st.floats(0.01, 100),
        e=st.floats(-3, 3),
    )
    def test_exact_power_law_recovered(self, c, e):
        x = np.array([1.0, 3.0, 10.0, 30.0, 100.0])
        fit = loglog_fit(x, c * x**e)
        assert fit.slope == pytest.approx(e, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_linear_fit_on_raw_values(self):
        fit = linear_fit([0, 1, 2, 3], [1, 3, 5, 7])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)


class TestInteractionCount:
    @pytest.mark.parametrize("n,directed,expected", [(1, False, 0), (4, True, 12), (4, False, 6)])
    def test_examples(self, n, directed, expected):
        assert interaction_count(n, directed) == expected

    @given(st.integers(1, 10_000))
    def test_directed_is_twice_undirected(self, n):
        assert interaction_count(n, True) == 2 * interaction_count(n, False)

    def test_invalid(self):
        with pytest.raises(DomainError):
            interaction_count(0)
