import numpy as np
import pytest

from conftest import brute_clock, brute_shift
from quditport.errors import LabelOutOfRange, NotScalar
from quditport.linalg import is_unitary
from quditport import observables
from quditport.observables import (
    exp_number_op,
    exp_phase_op,
    number_difference_observable,
    number_operator,
    number_state,
    number_sum_observable,
    phase_basis,
    phase_difference_observable,
    phase_operator,
    phase_state,
    phase_sum_observable,
    reflection,
    weyl_commutator,
)


def test_number_states():
    np.testing.assert_array_equal(number_state(2, 0), [1, 0])
    np.testing.assert_array_equal(number_state(3, 2), [0, 0, 1])
    gram = np.array([[np.vdot(number_state(5, m), number_state(5, n)) for n in range(5)] for m in range(5)])
    np.testing.assert_array_equal(gram, np.eye(5))
    with pytest.raises(LabelOutOfRange):
        number_state(3, 3)
    with pytest.raises(LabelOutOfRange):
        number_state(3, -1)


def test_phase_states():
    np.testing.assert_allclose(phase_state(2, 0), np.array([1, 1]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(phase_state(2, 1), np.array([1, -1]) / np.sqrt(2), atol=1e-15)
    f = np.stack([phase_state(8, k) for k in range(8)], axis=1)
    np.testing.assert_allclose(f.conj().T @ f, np.eye(8), atol=1e-14)
    np.testing.assert_allclose(f, phase_basis(8), atol=0)
    with pytest.raises(LabelOutOfRange):
        phase_state(4, 4)


@pytest.mark.parametrize("s", [2, 3, 5, 8, 16])
def test_phase_completeness(s):
    total = sum(np.outer(phase_state(s, k), phase_state(s, k).conj()) for k in range(s))
    np.testing.assert_allclose(total, np.eye(s), atol=1e-10)


class TestExponentialOperators:
    def test_shift_identity_and_cycle(self):
        np.testing.assert_array_equal(exp_phase_op(5, 0), np.eye(5))
        x = exp_phase_op(3, 1)
        for m in range(3):
            np.testing.assert_array_equal(x @ number_state(3, m), number_state(3, (m + 1) % 3))

    def test_negative_shift_reduced(self):
        np.testing.assert_array_equal(exp_phase_op(5, -2), exp_phase_op(5, 3))

    @pytest.mark.parametrize("s", [2, 3, 6, 11])
    def test_against_loop_oracles(self, s):
        for j in range(s):
            np.testing.assert_array_equal(exp_phase_op(s, j), brute_shift(s, j))
            np.testing.assert_allclose(exp_number_op(s, j), brute_clock(s, j), atol=1e-15)

    def test_shift_group_law(self):
        s = 6
        for a in range(s):
            for b in range(s):
                np.testing.assert_array_equal(exp_phase_op(s, a) @ exp_phase_op(s, b), exp_phase_op(s, (a + b) % s))

    def test_clock(self):
        np.testing.assert_array_equal(exp_number_op(7, 0), np.eye(7))
        np.testing.assert_allclose(exp_number_op(2, 1), np.diag([1, -1]), atol=1e-15)

    @pytest.mark.parametrize("s", [2, 3, 5, 8])
    def test_clock_translates_phase(self, s):
        for k in range(s):
            z = exp_number_op(s, k)
            for j in range(s):
                np.testing.assert_allclose(z @ phase_state(s, j), phase_state(s, (j - k) % s), atol=1e-12)

    @pytest.mark.parametrize("s", [2, 3, 5, 8])
    def test_shift_diagonal_in_phase_basis(self, s):
        # |theta> eigen-relation: e^{inP}|theta_k> = e^{+i n theta_k}|theta_k>
        for n in range(s):
            x = exp_phase_op(s, n)
            for k in range(s):
                expected = np.exp(2j * np.pi * n * k / s) * phase_state(s, k)
                np.testing.assert_allclose(x @ phase_state(s, k), expected, atol=1e-12)

    @pytest.mark.parametrize("s", range(1, 17))
    def test_unitary(self, s):
        for j in range(s):
            assert is_unitary(exp_phase_op(s, j), 1e-12)
            assert is_unitary(exp_number_op(s, j), 1e-12)


class TestHermitianForms:
    @pytest.mark.parametrize("s", [2, 3, 6])
    def test_phase_operator_is_generator(self, s):
        p = phase_operator(s)
        np.testing.assert_allclose(p, p.conj().T, atol=1e-14)
        w, v = np.linalg.eigh(p)
        np.testing.assert_allclose(w, 2 * np.pi * np.arange(s) / s, atol=1e-12)
        # exp(i P) reproduces the unit shift
        np.testing.assert_allclose((v * np.exp(1j * w)) @ v.conj().T, exp_phase_op(s, 1), atol=1e-12)

    def test_number_operator(self):
        np.testing.assert_array_equal(np.diag(number_operator(4)), [0, 1, 2, 3])


class TestWeyl:
    def test_trivial_phase(self):
        for n in range(5):
            assert weyl_commutator(5, 0, n) == pytest.approx(1.0, abs=1e-15)

    def test_four_levels(self):
        # explicit 4x4 product with loop-built factors
        prod = brute_clock(4, 1) @ brute_shift(4, 1) @ brute_clock(4, -1) @ brute_shift(4, -1)
        np.testing.assert_allclose(prod, 1j * np.eye(4), atol=1e-15)
        assert weyl_commutator(4, 1, 1) == pytest.approx(1j, abs=1e-15)

    @pytest.mark.parametrize("s", [2, 3, 5, 8])
    def test_exhaustive(self, s):
        for k in range(s):
            for n in range(s):
                prod = brute_clock(s, k) @ brute_shift(s, n) @ brute_clock(s, -k) @ brute_shift(s, -n)
                oracle = prod[0, 0]
                assert weyl_commutator(s, k, n) == pytest.approx(oracle, abs=1e-12)
                assert weyl_commutator(s, k, n) == pytest.approx(np.exp(2j * np.pi * k * n / s), abs=1e-10)

    def test_not_scalar_detected(self, monkeypatch):
        # a clock with one wrong diagonal entry no longer gives a scalar commutator
        def broken_clock(s, k):
            z = np.array(exp_number_op(s, k))
            if k % s:
                z[-1, -1] = 1.0
            return z

        monkeypatch.setattr(observables, "exp_number_op", broken_clock)
        with pytest.raises(NotScalar):
            observables.weyl_commutator(3, 1, 1)


class TestTwoSystemObservables:
    def test_phase_difference_on_equal_phases(self):
        s = 4
        pd = phase_difference_observable(s)
        for k in range(s):
            v = np.kron(phase_state(s, k), phase_state(s, k))
            np.testing.assert_allclose(pd @ v, 0 * v, atol=1e-12)

    def test_phase_difference_spectrum(self):
        s = 3
        w = np.linalg.eigvalsh(phase_difference_observable(s))
        expected = np.sort(np.repeat(2 * np.pi * np.arange(s) / s, s))
        np.testing.assert_allclose(w, expected, atol=1e-12)

    def test_number_sum(self):
        s = 4
        ns = number_sum_observable(s)
        e00 = np.kron(number_state(s, 0), number_state(s, 0))
        e13 = np.kron(number_state(s, 1), number_state(s, s - 1))
        np.testing.assert_allclose(ns @ e00, 0 * e00)
        np.testing.assert_allclose(ns @ e13, 0 * e13)
        assert sorted(np.diag(ns).real) == sorted(np.repeat(np.arange(s), s))

    @pytest.mark.parametrize("s", [2, 3, 5])
    def test_commuting(self, s):
        pd, ns = phase_difference_observable(s), number_sum_observable(s)
        assert np.linalg.norm(pd @ ns - ns @ pd) < 1e-10
        ps, nd = phase_sum_observable(s), number_difference_observable(s)
        assert np.linalg.norm(ps @ nd - nd @ ps) < 1e-10

    @pytest.mark.parametrize("s", [2, 3, 5])
    def test_reflection_flips_b_side(self, s):
        rb = np.kron(np.eye(s), reflection(s))
        np.testing.assert_allclose(rb @ phase_difference_observable(s) @ rb, phase_sum_observable(s), atol=1e-12)
        np.testing.assert_allclose(rb @ number_sum_observable(s) @ rb, number_difference_observable(s), atol=1e-12)
