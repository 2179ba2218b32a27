"""Forward-problem tests: spectra, survival functions, and moments.

The independent oracle throughout is the matrix exponential of the full
generator: starting from the return state, the survival function is the
probability mass not yet absorbed at time t.
"""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from phasekit import direct, models
from phasekit.errors import DegenerateSpectrum, IllConditioned


RATES = np.array([1.0, 2.0, 3.0, 4.0, 5.0])


def expm_survival(gen, ts):
    """Absorption-based survival oracle via scipy's matrix exponential."""
    start = np.zeros(gen.N + 1)
    start[gen.return_state - 1] = 1.0
    return np.array([
        1.0 - (start @ scipy.linalg.expm(gen.Q * t))[gen.N] for t in ts
    ])


rate_vectors = st.lists(
    st.floats(min_value=0.05, max_value=20.0), min_size=5, max_size=5
)


class TestSpectrum:
    def test_matches_scipy_eigenvalues(self):
        gen = models.build_generator(models.M9, RATES)
        spec = direct.spectrum(gen)
        ref = np.sort(np.linalg.eigvals(gen.Qtilde).real)
        np.testing.assert_allclose(np.sort(spec.eigenvalues), ref, rtol=1e-12)

    def test_negative_real(self):
        gen = models.build_generator(models.M2, RATES)
        spec = direct.spectrum(gen)
        assert spec.is_real_distinct
        assert all(l < 0 for l in spec.eigenvalues)


class TestPhaseTypeParams:
    @pytest.mark.parametrize("tag", ["M2", "M3", "M4", "M8", "M9"])
    def test_survival_matches_expm(self, tag):
        gen = models.build_generator(models.model_from_string(tag), RATES)
        p = direct.phase_type_params(gen)
        ts = np.linspace(0.0, 5.0, 11)
        np.testing.assert_allclose(
            direct.survival(p, ts), expm_survival(gen, ts), atol=1e-10)

    def test_amplitudes_sum_to_one(self):
        gen = models.build_generator(models.M8, RATES)
        p = direct.phase_type_params(gen)
        assert np.isclose(sum(p.A), 1.0, atol=1e-12)

    def test_survival_at_zero(self):
        gen = models.build_generator(models.M4, RATES)
        p = direct.phase_type_params(gen)
        assert np.isclose(direct.survival(p, 0.0), 1.0)

    def test_density_integrates_to_one(self):
        gen = models.build_generator(models.M9, RATES)
        p = direct.phase_type_params(gen)
        ts = np.linspace(0.0, 200.0, 400001)
        integral = np.trapezoid(direct.density(p, ts), ts)
        assert np.isclose(integral, 1.0, atol=1e-6)

    def test_mean_time(self):
        gen = models.build_generator(models.M9, RATES)
        p = direct.phase_type_params(gen)
        # Integral of the survival function equals the mean gap.
        ts = np.linspace(0.0, 300.0, 600001)
        mean_num = np.trapezoid(direct.survival(p, ts), ts)
        assert np.isclose(direct.mean_time(p), mean_num, rtol=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(rates=rate_vectors)
    def test_survival_decreasing_property(self, rates):
        gen = models.build_generator(models.M9, np.array(rates))
        eigs = np.linalg.eigvals(gen.Qtilde)
        if np.any(np.abs(eigs.imag) > 1e-10):
            return
        if np.min(np.diff(np.sort(eigs.real))) < 1e-6:
            return
        try:
            p = direct.phase_type_params(gen)
        except (DegenerateSpectrum, IllConditioned):
            # Non-degeneracy restriction: mixtures need every mode to
            # load on the observed state.
            return
        ts = np.linspace(0.0, 10.0, 200)
        vals = direct.survival(p, ts)
        assert np.all(np.diff(vals) <= 1e-12)
        assert np.all(vals <= 1.0 + 1e-12)


class TestSymmetricFunctions:
    def test_elementary_symmetric(self):
        lam = np.array([-1.0, -2.0, -5.0])
        esp = direct.elementary_symmetric(lam)
        # Signed coefficients of the monic polynomial with these roots.
        ref = np.poly(lam)
        np.testing.assert_allclose(
            esp, [-ref[1], ref[2], -ref[3]], rtol=1e-14)

    def test_homogeneous_symmetric(self):
        lam = np.array([2.0, 3.0])
        # h_2(x, y) = x^2 + xy + y^2
        assert np.isclose(direct.homogeneous_symmetric(lam, 2), 19.0)

    def test_moments_consistency(self):
        gen = models.build_generator(models.M9, RATES)
        p = direct.phase_type_params(gen)
        m_spec = direct.moments(p)
        m_gen = direct.moments_from_generator(gen)
        np.testing.assert_allclose(
            m_spec.as_vector(), m_gen.as_vector(), rtol=1e-9)

    def test_m9_example_moments(self):
        gen = models.build_generator(models.M9, RATES)
        m = direct.moments_from_generator(gen)
        np.testing.assert_allclose(m.L, (-15.0, 27.0, -10.0), rtol=1e-12)
        np.testing.assert_allclose(m.S, (-5.0, 60.0), rtol=1e-12)

    def test_s1_is_negated_exit_flux(self):
        gen = models.build_generator(models.M4, RATES)
        p = direct.phase_type_params(gen)
        m = direct.moments(p)
        # S1 equals minus the stationary exit flux density f(0).
        assert np.isclose(m.S[0], -direct.density(p, 0.0), rtol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(rates=rate_vectors)
    def test_charpoly_oracle_property(self, rates):
        gen = models.build_generator(models.M8, np.array(rates))
        m = direct.moments_from_generator(gen)
        # L holds the signed characteristic coefficients of Qtilde.
        coeffs = np.poly(gen.Qtilde)
        np.testing.assert_allclose(
            m.L, (-coeffs[1], coeffs[2], -coeffs[3]),
            rtol=1e-8, atol=1e-10)
