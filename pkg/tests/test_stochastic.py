"""Simulation and fitting tests."""

import numpy as np
import pytest

from phasekit import direct, models, stochastic


def m9_generator():
    return models.build_generator(
        models.M9, np.array([1.0, 2.0, 3.0, 4.0, 5.0]))


class TestSimulate:
    def test_deterministic(self):
        gen = m9_generator()
        t1 = stochastic.simulate_events(gen, 500, seed=9)
        t2 = stochastic.simulate_events(gen, 500, seed=9)
        np.testing.assert_array_equal(t1.gaps, t2.gaps)

    def test_seed_changes_trace(self):
        gen = m9_generator()
        t1 = stochastic.simulate_events(gen, 500, seed=9)
        t2 = stochastic.simulate_events(gen, 500, seed=10)
        assert not np.array_equal(t1.gaps, t2.gaps)

    def test_exponential_mean(self):
        gen = models.build_generator(models.unbranched_chain(1), [2.0])
        trace = stochastic.simulate_events(gen, 100_000, seed=1)
        # 3 sigma of the exponential sample mean
        assert abs(trace.gaps.mean() - 0.5) < 3 * 0.5 / np.sqrt(100_000)

    def test_m9_mean(self):
        gen = m9_generator()
        p = direct.phase_type_params(gen)
        trace = stochastic.simulate_events(gen, 100_000, seed=2)
        sd = np.std(trace.gaps)
        assert abs(trace.gaps.mean() - direct.mean_time(p)) < (
            3 * sd / np.sqrt(100_000))

    def test_provenance_recorded(self):
        gen = m9_generator()
        trace = stochastic.simulate_events(gen, 10, seed=0)
        assert str(trace.model) == "M9"
        np.testing.assert_array_equal(trace.rates, gen.rates)

    def test_all_gaps_positive(self):
        trace = stochastic.simulate_events(m9_generator(), 2000, seed=5)
        assert np.all(trace.gaps > 0.0)


class TestEmpiricalSurvival:
    def test_step_values(self):
        trace = stochastic.EventTrace(gaps=np.array([1.0, 2.0, 3.0]), seed=0)
        es = stochastic.empirical_survival(trace)
        assert es(1.5) == pytest.approx(2.0 / 3.0)
        assert es(0.0) == pytest.approx(1.0)
        assert es(5.0) == pytest.approx(0.0)

    def test_ks_self_consistency(self):
        gen = m9_generator()
        p = direct.phase_type_params(gen)
        trace = stochastic.simulate_events(gen, 100_000, seed=3)
        assert stochastic.ks_statistic(trace, p) <= 0.00515

    def test_ks_detects_wrong_model(self):
        gen = models.build_generator(models.unbranched_chain(1), [1.0])
        trace = stochastic.simulate_events(gen, 10_000, seed=4)
        wrong = direct.PhaseTypeParams(lam=(-10.0,), A=(1.0,))
        assert stochastic.ks_statistic(trace, wrong) > 0.5


class TestFit:
    def test_single_exponential(self):
        gen = models.build_generator(models.unbranched_chain(1), [2.0])
        trace = stochastic.simulate_events(gen, 10_000, seed=6)
        fit = stochastic.fit_multiexp(
            trace, 1, stochastic.FitConfig(restarts=3))
        mle = -1.0 / trace.gaps.mean()
        # the exponential MLE has standard error rate/sqrt(n)
        assert abs(fit.params.lam[0] - mle) < 3 * 2.0 / np.sqrt(10_000)
        assert fit.params.A[0] == pytest.approx(1.0)

    def test_three_component_recovery(self):
        gen = m9_generator()
        p = direct.phase_type_params(gen)
        trace = stochastic.simulate_events(gen, 200_000, seed=7)
        fit = stochastic.fit_multiexp(
            trace, 3, stochastic.FitConfig(restarts=6))
        got = np.sort(fit.params.lam)
        want = np.sort(p.lam)
        assert np.max(np.abs(got - want) / np.abs(want)) < 0.10

    def test_likelihood_sanity_floor(self):
        gen = m9_generator()
        p = direct.phase_type_params(gen)
        trace = stochastic.simulate_events(gen, 20_000, seed=8)
        fit = stochastic.fit_multiexp(
            trace, 3, stochastic.FitConfig(restarts=6))
        truth_ll = float(
            np.sum(np.log(direct.density(p, trace.gaps))))
        assert fit.log_likelihood >= truth_ll - 1e-6 * len(trace)

    def test_nesting_improves_likelihood(self):
        gen = models.build_generator(models.unbranched_chain(1), [1.0])
        trace = stochastic.simulate_events(gen, 5_000, seed=9)
        f1 = stochastic.fit_multiexp(
            trace, 1, stochastic.FitConfig(restarts=3))
        f2 = stochastic.fit_multiexp(
            trace, 2, stochastic.FitConfig(restarts=6))
        assert f2.log_likelihood >= f1.log_likelihood - 1e-6

    def test_insufficient_data(self):
        trace = stochastic.EventTrace(gaps=np.linspace(0.1, 1.0, 10), seed=0)
        with pytest.raises(ValueError):
            stochastic.fit_multiexp(trace, 3)


class TestCsv:
    def test_round_trip(self, tmp_path):
        gen = m9_generator()
        trace = stochastic.simulate_events(gen, 200, seed=10)
        path = str(tmp_path / "trace.csv")
        stochastic.write_trace_csv(trace, path)
        loaded = stochastic.read_trace_csv(path)
        np.testing.assert_array_equal(loaded.gaps, trace.gaps)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.5\n0.7\n")
        with pytest.raises(ValueError):
            stochastic.read_trace_csv(str(path))
