import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import erfc, eval_hermite

from catsteer import fock_oracle as fo
from catsteer.errors import ImpossibleOutcomeError, TruncationError


def ref_hermite(n, x):
    # textbook form with physicists' Hermite polynomials, fine for small n
    norm = 1 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return norm * eval_hermite(n, x) * np.exp(-x * x / 2)


class TestHermite:
    @pytest.mark.parametrize("n", [0, 1, 2, 5, 12])
    def test_matches_textbook(self, n):
        x = np.linspace(-6, 6, 101)
        np.testing.assert_allclose(fo.hermite_wavefunction(n, x), ref_hermite(n, x), atol=1e-13)

    def test_orthonormal(self):
        nodes, w = np.polynomial.legendre.leggauss(400)
        x = 20 * nodes
        psi = fo.hermite_functions(40, x)
        gram = (psi * (20 * w)) @ psi.T
        np.testing.assert_allclose(gram, np.eye(41), atol=1e-10)

    def test_large_n_finite(self):
        v = fo.hermite_functions(300, np.linspace(-30, 30, 7))
        assert np.all(np.isfinite(v))

    def test_negative_n(self):
        with pytest.raises(ValueError):
            fo.hermite_wavefunction(-1, 0.0)


class TestCoherent:
    def test_completeness(self):
        for a in (0.0, 0.5, 2.0, 4.0, 8.0):
            c = fo.coherent_amplitudes(a, fo.required_dim(a))
            assert np.vdot(c, c).real == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_small_dim(self):
        c = fo.coherent_amplitudes(0.0, 4)
        np.testing.assert_array_equal(c, [1, 0, 0, 0])

    def test_truncation_rejected(self):
        with pytest.raises(TruncationError):
            fo.coherent_amplitudes(4.0, 20)

    def test_truncation_error_value(self):
        # tail of a Poisson(4) beyond n = 10
        from scipy.stats import poisson

        assert fo.truncation_error(2.0, 11) == pytest.approx(poisson.sf(10, 4.0), rel=1e-10)

    def test_required_dim(self):
        assert fo.required_dim(4.0) == 68
        assert fo.FockConfig.for_alpha(0.0).dim == 20
        with pytest.raises(ValueError):
            fo.FockConfig(0)

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_ladder_moments_coherent(self, alpha):
        osc = fo.OscillatorState(fo.coherent_amplitudes(alpha, fo.required_dim(alpha)))
        m = fo.ladder_moments(osc)
        assert m["mean_X"] == pytest.approx(math.sqrt(2) * alpha, abs=1e-12)
        assert m["mean_P"] == pytest.approx(0.0, abs=1e-12)
        assert m["var_X"] == pytest.approx(0.5, abs=1e-10)
        assert m["var_P"] == pytest.approx(0.5, abs=1e-10)

    def test_wavefunction_matches_ladder_phase(self):
        # P-basis amplitudes (sum c_n i^n psi_n) must reproduce the ladder-operator <P>
        rng = np.random.default_rng(3)
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        osc = fo.OscillatorState(c / np.linalg.norm(c))
        mean_p = fo.ladder_moments(osc)["mean_P"]
        f = lambda p: p * fo.quadrature_density(osc, "P", p)
        assert quad(f, -12, 12, limit=400)[0] == pytest.approx(mean_p, abs=1e-9)
        g = lambda x: x * fo.quadrature_density(osc, "X", x)
        assert quad(g, -12, 12, limit=400)[0] == pytest.approx(fo.ladder_moments(osc)["mean_X"], abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_heisenberg_floor(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        c[-2:] = 0  # keep away from the truncation edge
        m = fo.ladder_moments(fo.OscillatorState(c / np.linalg.norm(c)))
        assert math.sqrt(m["var_X"] * m["var_P"]) >= 0.5 - 1e-10

    def test_bad_basis(self):
        osc = fo.OscillatorState(np.array([1.0 + 0j]))
        with pytest.raises(ValueError):
            fo.wavefunction(osc, "Q", 0.0)


class TestCat:
    def test_norm_and_truncation(self):
        s = fo.build_coherent_cat(2.0)
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-14)
        assert s.truncation_error < 1e-12

    def test_reduced_spin(self):
        for a in (0.0, 0.5, 1.0, 2.0):
            b = fo.reduced_spin(fo.build_coherent_cat(a))
            assert b.by == pytest.approx(math.exp(-2 * a * a), abs=1e-12)
            assert b.bx == pytest.approx(0.0, abs=1e-12)
            assert b.bz == pytest.approx(0.0, abs=1e-12)

    def test_parity_probability(self):
        a = 1.0
        p, _ = fo.parity_condition(fo.build_coherent_cat(a), 1)
        assert p == pytest.approx(0.5 * (1 + math.exp(-2 * a * a)), abs=1e-12)

    def test_parity_steers_sigma_y(self):
        s = fo.build_coherent_cat(2.0)
        _, even = fo.parity_condition(s, 1)
        _, odd = fo.parity_condition(s, -1)
        assert even.by == pytest.approx(1.0, abs=1e-12)
        assert odd.by == pytest.approx(-1.0, abs=1e-12)
        assert abs(even.bx) < 1e-12

    def test_sign_condition(self):
        a = 1.0
        s = fo.build_coherent_cat(a)
        eps = 0.5 * erfc(math.sqrt(2) * a)
        p, b = fo.sign_condition(s, 1)
        assert p == pytest.approx(0.5, abs=1e-12)
        assert b.bz == pytest.approx(1 - 2 * eps, abs=1e-10)

    def test_impossible_parity(self):
        vac = fo.product_state([1, 0], [1, 0, 0, 0])
        with pytest.raises(ImpossibleOutcomeError):
            fo.parity_condition(vac, -1)

    def test_bad_outcomes(self):
        s = fo.build_coherent_cat(1.0)
        for fn in (fo.parity_condition, fo.sign_condition):
            with pytest.raises(ValueError):
                fn(s, 0)
        with pytest.raises(ValueError):
            fo.project_spin(s, "W", 1)

    def test_bloch_too_long(self):
        with pytest.raises(ValueError):
            fo.BlochVector(1.0, 0.5, 0.0)


class TestSpinWitness:
    def test_alpha_two(self):
        # Var_inf(sigma_Y | parity) vanishes; Var_inf(sigma_Z | sign X) = 4 eps (1 - eps)
        eps = 0.5 * erfc(math.sqrt(2) * 2.0)
        r = fo.spin_steering_witness(fo.build_coherent_cat(2.0))
        assert r.lhs == pytest.approx(4 * eps * (1 - eps), rel=1e-6)
        assert r.lhs == pytest.approx(1.2668095506218673e-4, rel=1e-6)
        assert r.violated

    def test_product_state_not_violated(self):
        r = fo.spin_steering_witness(fo.build_coherent_cat(0.0))
        assert r.lhs == pytest.approx(1.0, abs=1e-12)
        assert not r.violated

    def test_x_axis_no_signal(self):
        r = fo.spin_steering_witness(fo.build_coherent_cat(2.0), parity_axis="X")
        assert not r.violated

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0])
    def test_monotone_in_alpha(self, alpha):
        lo = fo.spin_steering_witness(fo.build_coherent_cat(alpha)).lhs
        hi = fo.spin_steering_witness(fo.build_coherent_cat(alpha * 1.5)).lhs
        assert hi < lo

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            fo.spin_steering_witness(fo.build_coherent_cat(1.0), parity_axis="Z")
