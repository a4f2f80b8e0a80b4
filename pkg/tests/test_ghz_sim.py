import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catsteer import ghz_sim as g
from catsteer.errors import ImpossibleOutcomeError

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense_op(ops):
    m = np.array([[1.0]])
    for o in ops:
        m = np.kron(m, PAULI[o])
    return m


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return g.QubitState(n, v / np.linalg.norm(v))


class TestState:
    def test_amplitudes(self):
        s = g.build_ghz(3)
        assert s.amplitudes[0] == pytest.approx(1 / math.sqrt(2))
        assert s.amplitudes[-1] == pytest.approx(-1 / math.sqrt(2))
        assert s.norm() == pytest.approx(1.0)

    @pytest.mark.parametrize("n", [1, g.MAX_QUBITS + 1])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            g.build_ghz(n)

    def test_bad_pauli(self):
        with pytest.raises(ValueError):
            g.PauliString("XQ")

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            g.apply_pauli(g.build_ghz(3), g.PauliString("XX"))


class TestPauli:
    @settings(max_examples=40, deadline=None)
    @given(st.text("IXYZ", min_size=3, max_size=5), st.integers(0, 2**32 - 1))
    def test_apply_matches_kron(self, ops, seed):
        s = random_state(len(ops), seed)
        np.testing.assert_allclose(g.apply_pauli(s, g.PauliString(ops)), dense_op(ops) @ s.amplitudes, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 7).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n)))
    def test_two_branch_matches_dense(self, ops):
        n = len(ops)
        ps = g.PauliString(ops)
        assert g.two_branch_expectation(n, ps) == pytest.approx(g.expectation(g.build_ghz(n), ps), abs=1e-12)

    def test_full_x_and_y(self):
        # <XXX> = -1 for the minus-sign GHZ; each Y pair contributes -1
        assert g.expectation(g.build_ghz(3), g.PauliString("XXX")) == pytest.approx(-1)
        assert g.expectation(g.build_ghz(3), g.PauliString("XYY")) == pytest.approx(1)


class TestConditioning:
    def test_probabilities(self):
        s = g.build_ghz(4)
        for setting in "ZXY":
            ps = [g.alice_condition(s, setting, o)[0] for o in (1, -1)]
            assert ps == pytest.approx([0.5, 0.5])

    def test_z_branch(self):
        _, c = g.alice_condition(g.build_ghz(3), "Z", 1)
        dist = g.collective_sz_dist(c)
        assert dist.moments().mean == pytest.approx(1.0)
        assert dist.moments().variance == pytest.approx(0.0)

    def test_impossible(self):
        _, c = g.alice_condition(g.build_ghz(4), "Z", 1)
        with pytest.raises(ImpossibleOutcomeError):
            g.alice_condition(c, "Z", -1)

    def test_bad_setting(self):
        with pytest.raises(ValueError):
            g.alice_condition(g.build_ghz(3), "W", 1)

    def test_pr_y_j_index(self):
        with pytest.raises(IndexError):
            g.pr_y_j_string(3, 4)
        assert g.pr_y_j_string(3, 2).ops == "YXY"

    def test_reduced_state(self):
        rho = g.reduced_bob_state(g.build_ghz(3))
        np.testing.assert_allclose(rho, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)


class TestUncertaintyRelation:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    def test_random_states_obey(self, m, seed):
        s = random_state(m, seed)
        assert g.ur_lhs(s) >= g.ur_bound(s) - 1e-10

    def test_robertson_commutator(self):
        # [S_Z, Pr_Y] = -i sum_J Pr_Y(J) with S_Z in half units
        m = 3
        sz = sum(dense_op("I" * k + "Z" + "I" * (m - k - 1)) for k in range(m)) / 2
        pry = dense_op("Y" * m)
        rhs = -1j * sum(dense_op(g.pr_y_j_string(m, J).ops) for J in range(1, m + 1))
        np.testing.assert_allclose(sz @ pry - pry @ sz, rhs, atol=1e-12)


class TestWitness:
    @pytest.mark.parametrize("n,bound", [(3, 1.0), (4, 1.5), (5, 2.0), (7, 3.0)])
    def test_violated(self, n, bound):
        r = g.ghz_steering_witness(n)
        assert r.lhs == pytest.approx(0.0, abs=1e-12)
        assert r.bound == pytest.approx(bound, abs=1e-12)
        assert r.violated

    @pytest.mark.parametrize("n,sign", [(3, 1), (4, 1), (5, -1), (6, -1), (7, 1)])
    def test_pr_y_j_signs(self, n, sign):
        setting = ("X", "Y") if (n - 1) % 2 == 0 else ("Y", "X")
        inf = g.ghz_inference(n, *setting)
        assert inf.pry_j_values[1] == pytest.approx([sign] * (n - 1))
        assert inf.pry_j_values[-1] == pytest.approx([-sign] * (n - 1))

    @pytest.mark.parametrize("n", [3, 5])
    def test_x_predicts_pry_for_even_bob(self, n):
        assert g.ghz_inference(n, "X", "Y").var_inf_pry == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n", [4, 6])
    def test_roles_swap_for_odd_bob(self, n):
        assert g.ghz_inference(n, "X", "Y").var_inf_pry == pytest.approx(1.0, abs=1e-12)
        assert g.ghz_inference(n, "Y", "X").var_inf_pry == pytest.approx(0.0, abs=1e-12)

    def test_fixed_assignment(self):
        assert not g.ghz_steering_witness(4, assignment="XY").violated
        assert g.ghz_steering_witness(4, assignment="YX").violated
        with pytest.raises(ValueError):
            g.ghz_steering_witness(4, assignment="ZZ")

    def test_unit_smearing(self):
        r = g.ghz_steering_witness(3, smearing=1.0)
        assert r.lhs == pytest.approx(1.0)
        assert not r.violated
        with pytest.raises(ValueError):
            g.ghz_steering_witness(3, smearing=-0.1)

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_unconditioned(self, n):
        r = g.unconditioned_witness(n)
        assert not r.violated
        assert r.bound == pytest.approx(0.0, abs=1e-12)

    def test_large_n(self):
        assert g.ghz_steering_witness(12).violated
