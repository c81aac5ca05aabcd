import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrsgame import linalg
from qrsgame.errors import ContractError, InvalidStateError, UnsupportedDimensionError

components = st.floats(-1, 1, allow_nan=False)
vectors = st.tuples(components, components, components)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T


class TestPauliDot:
    def test_z(self):
        np.testing.assert_array_equal(linalg.pauli_dot((0, 0, 1)), np.diag([1, -1]))

    def test_zero(self):
        np.testing.assert_array_equal(linalg.pauli_dot((0, 0, 0)), np.zeros((2, 2)))

    def test_x(self):
        np.testing.assert_array_equal(linalg.pauli_dot((1, 0, 0)), [[0, 1], [1, 0]])

    @given(vectors)
    def test_traceless_hermitian(self, v):
        h = linalg.pauli_dot(v)
        assert abs(np.trace(h)) < 1e-12
        linalg.check_hermitian(h)

    def test_wrong_length(self):
        with pytest.raises(ContractError):
            linalg.pauli_dot((1, 0))


class TestStateFromBloch:
    def test_pure_zero(self):
        np.testing.assert_allclose(linalg.state_from_bloch((0, 0, 1)), np.diag([1, 0]))

    def test_maximally_mixed(self):
        np.testing.assert_allclose(linalg.state_from_bloch((0, 0, 0)), np.eye(2) / 2)

    def test_outside_ball(self):
        with pytest.raises(InvalidStateError):
            linalg.state_from_bloch((0, 0, 2))

    @given(vectors)
    def test_valid_iff_in_ball(self, v):
        norm = np.linalg.norm(v)
        if norm <= 1.0:
            rho = linalg.check_density(linalg.state_from_bloch(v))
            evals = np.linalg.eigvalsh(rho)
            np.testing.assert_allclose(evals, [(1 - norm) / 2, (1 + norm) / 2], atol=1e-12)
        elif norm > 1.0 + 1e-9:
            with pytest.raises(InvalidStateError):
                linalg.state_from_bloch(v)


class TestLambdaMax:
    def test_unit(self):
        assert linalg.lambda_max(linalg.pauli_dot((0.6, 0, 0.8))) == pytest.approx(1.0, abs=1e-12)

    def test_identity(self):
        assert linalg.lambda_max(np.eye(2)) == pytest.approx(1.0)

    def test_short(self):
        assert linalg.lambda_max(linalg.pauli_dot((0.3, 0, 0))) == pytest.approx(0.3, abs=1e-12)

    @given(vectors)
    def test_norm_property(self, v):
        assert linalg.lambda_max(linalg.pauli_dot(v)) == pytest.approx(np.linalg.norm(v), abs=1e-10)

    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_matches_eigvalsh(self, d):
        rng = np.random.default_rng(d)
        h = random_hermitian(rng, d)
        assert linalg.lambda_max(h) == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-10)

    def test_non_hermitian(self):
        with pytest.raises(ContractError):
            linalg.lambda_max(np.array([[0, 1], [0, 0]], dtype=complex))


class TestTensor:
    def test_identity(self):
        np.testing.assert_array_equal(linalg.tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_projectors(self):
        p0 = np.diag([1.0, 0.0])
        np.testing.assert_array_equal(linalg.tensor(p0, p0), np.diag([1.0, 0, 0, 0]))

    def test_trace_product(self):
        rng = np.random.default_rng(3)
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 4)
        # direct multiplication oracle
        assert np.trace(linalg.tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b))

    def test_too_large(self):
        with pytest.raises(UnsupportedDimensionError):
            linalg.tensor(np.eye(4), np.eye(4))


class TestPartialTrace:
    def test_product_keep_first(self):
        rng = np.random.default_rng(5)
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
        np.testing.assert_allclose(linalg.partial_trace(np.kron(a, b), [0]), np.trace(b) * a, atol=1e-12)

    def test_identity(self):
        np.testing.assert_allclose(linalg.partial_trace(np.eye(4), [True, False]), 2 * np.eye(2))

    def test_singlet_marginal(self):
        psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
        np.testing.assert_allclose(linalg.partial_trace(np.outer(psi, psi), [0]), np.eye(2) / 2, atol=1e-12)

    def test_three_qubits(self):
        rng = np.random.default_rng(9)
        a, b, c = (random_hermitian(rng, 2) for _ in range(3))
        full = np.kron(np.kron(a, b), c)
        np.testing.assert_allclose(linalg.partial_trace(full, [0, 2]), np.trace(b) * np.kron(a, c), atol=1e-10)
        np.testing.assert_allclose(linalg.partial_trace(full, [1]), np.trace(a) * np.trace(c) * b, atol=1e-10)

    def test_invalid_mask(self):
        with pytest.raises(ContractError):
            linalg.partial_trace(np.eye(4), [True])
        with pytest.raises(ContractError):
            linalg.partial_trace(np.eye(4), [2])

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_hermiticity_preserved(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 8)
        for keep in ([0], [1, 2], [0, 2]):
            linalg.check_hermitian(linalg.partial_trace(h, keep), tol=1e-10)


def test_policy_override_round_trip():
    prev = linalg.set_policy(psd_slack=1e-6)
    try:
        assert linalg.policy().psd_slack == 1e-6
    finally:
        linalg.set_policy(**vars(prev))
    assert linalg.policy().psd_slack == 1e-10
