import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsem.ensembles import random_density, random_unitary
from dsem.errors import CapacityError, DegenerateInputError, UsageError, ValidationError
from dsem.operators import (
    DensityOperator,
    commutator_deviation,
    density_from_mixture,
    operator_log2,
    operator_sqrt,
    partial_trace,
    spectral_decompose,
    tensor_all,
    tensor_product,
)

PLUS = np.array([1.0, 1.0]) / math.sqrt(2)
BELL = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)


def random_hermitian(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


class TestSpectralDecompose:
    def test_identity(self):
        spec = spectral_decompose(np.eye(2))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 1.0])
        np.testing.assert_allclose(spec.eigenkets.conj().T @ spec.eigenkets, np.eye(2), atol=1e-12)

    def test_diagonal(self):
        spec = spectral_decompose(np.diag([0.25, 0.75]))
        np.testing.assert_allclose(spec.eigenvalues, [0.75, 0.25])
        np.testing.assert_allclose(np.abs(spec.eigenkets), [[0, 1], [1, 0]], atol=1e-12)

    def test_rank_one_projector(self):
        spec = spectral_decompose(0.5 * np.ones((2, 2)))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(spec.ket(0), PLUS, atol=1e-12)

    def test_phase_is_fixed(self, rng):
        spec = spectral_decompose(random_hermitian(6, rng))
        for i in range(6):
            k = spec.ket(i)
            first = k[np.abs(k) > 1e-10][0]
            assert abs(first.imag) < 1e-12 and first.real > 0

    def test_deterministic(self, rng):
        h = random_hermitian(8, rng)
        a, b = spectral_decompose(h), spectral_decompose(h.copy())
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
        np.testing.assert_array_equal(a.eigenkets, b.eigenkets)

    @pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[1.0, 1.0], [0.0, 1.0]])])
    def test_rejects_bad_input(self, bad):
        with pytest.raises(ValidationError):
            spectral_decompose(bad)

    def test_error_names_entry_pair(self):
        with pytest.raises(ValidationError, match=r"\(0, 1\)"):
            spectral_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))

    @pytest.mark.parametrize("dim", [1, 2, 5, 17, 64])
    def test_round_trip(self, dim, rng):
        h = random_hermitian(dim, rng)
        spec = spectral_decompose(h)
        assert np.all(np.diff(spec.eigenvalues) <= 0)
        np.testing.assert_allclose(spec.reconstruct(), h, atol=1e-8)
        v = spec.eigenkets
        np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-8)


class TestDensityOperator:
    def test_valid(self):
        rho = DensityOperator(np.diag([0.75, 0.25]))
        assert rho.dim == 2 and rho.subsystem_dims == (2,)
        assert not rho.matrix.flags.writeable

    def test_clamps_tiny_negative(self):
        rho = DensityOperator(np.diag([1.0 + 5e-11, -5e-11]))
        assert rho.eigenvalues[-1] == 0.0

    @pytest.mark.parametrize("m", [
        np.diag([1.1, -0.1]),
        np.diag([0.5, 0.4]),
        np.array([[0.5, 0.1], [0.2, 0.5]]),
    ])
    def test_rejects_invalid(self, m):
        with pytest.raises(ValidationError):
            DensityOperator(m)

    def test_subsystem_dims_must_multiply(self):
        with pytest.raises(ValidationError):
            DensityOperator(np.eye(4) / 4, (3, 2))

    def test_spectrum_computed_once_under_threads(self, rng):
        rho = random_density(16, rng)
        rho = DensityOperator(rho.matrix, validate=False)
        seen = []
        threads = [threading.Thread(target=lambda: seen.append(rho.spectrum)) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(s is seen[0] for s in seen)


class TestOperatorFunctions:
    @pytest.mark.parametrize("rho,expected", [
        (np.eye(2) / 2, np.eye(2) / math.sqrt(2)),
        (0.5 * np.ones((2, 2)), 0.5 * np.ones((2, 2))),
        (np.diag([0.64, 0.36]), np.diag([0.8, 0.6])),
    ])
    def test_sqrt(self, rho, expected):
        np.testing.assert_allclose(operator_sqrt(DensityOperator(rho)), expected, atol=1e-12)

    @pytest.mark.parametrize("rho,expected", [
        (np.eye(2) / 2, -np.eye(2)),
        (0.5 * np.ones((2, 2)), np.zeros((2, 2))),
        (np.diag([0.5, 0.25, 0.25]), np.diag([-1.0, -2.0, -2.0])),
    ])
    def test_log2(self, rho, expected):
        np.testing.assert_allclose(operator_log2(DensityOperator(rho)), expected, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 7, 20])
    def test_sqrt_squares_back(self, dim, rng):
        rho = random_density(dim, rng, rank=max(1, dim // 2))
        s = operator_sqrt(rho)
        np.testing.assert_allclose(s @ s, rho.matrix, atol=1e-8)
        np.testing.assert_allclose(s, s.conj().T, atol=1e-12)

    def test_log2_inverts_exp2_on_support(self, rng):
        rho = random_density(6, rng)
        spec = spectral_decompose(operator_log2(rho))
        back = spec.eigenkets @ np.diag(2.0 ** spec.eigenvalues) @ spec.eigenkets.conj().T
        np.testing.assert_allclose(back, rho.matrix, atol=1e-8)


class TestTensorAndPartialTrace:
    def test_maximally_mixed(self):
        t = tensor_product(DensityOperator.maximally_mixed(2), DensityOperator.maximally_mixed(2))
        np.testing.assert_allclose(t.matrix, np.eye(4) / 4)
        assert t.subsystem_dims == (2, 2)

    def test_basis_projectors(self):
        t = tensor_product(DensityOperator.diagonal([1, 0]), DensityOperator.diagonal([0, 1]))
        np.testing.assert_allclose(np.diag(t.matrix).real, [0, 1, 0, 0])

    def test_diagonal_products(self):
        t = tensor_product(DensityOperator.diagonal([0.6, 0.4]), DensityOperator.diagonal([0.7, 0.3]))
        np.testing.assert_allclose(t.matrix, np.diag([0.42, 0.18, 0.28, 0.12]), atol=1e-15)

    def test_capacity(self):
        a = DensityOperator.maximally_mixed(8)
        with pytest.raises(CapacityError):
            tensor_product(a, a, limit=32)

    def test_capacity_from_environment(self, monkeypatch):
        monkeypatch.setenv("DSEM_MAX_DIM", "10")
        a = DensityOperator.maximally_mixed(4)
        with pytest.raises(CapacityError):
            tensor_product(a, a)

    def test_bell_reduction(self):
        bell = DensityOperator.pure(BELL, (2, 2))
        np.testing.assert_allclose(partial_trace(bell, 0).matrix, np.eye(2) / 2, atol=1e-15)

    def test_trace_out_first(self):
        c = DensityOperator.diagonal([0, 1, 0, 0], (2, 2))
        np.testing.assert_allclose(partial_trace(c, 1).matrix, np.diag([0, 1]))

    def test_three_parties(self, rng):
        a, b, c = (random_density(d, rng) for d in (2, 3, 2))
        abc = tensor_all([a, b, c])
        assert abc.subsystem_dims == (2, 3, 2)
        np.testing.assert_allclose(partial_trace(abc, [0, 2]).matrix, tensor_product(a, c).matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(abc, 1).matrix, b.matrix, atol=1e-12)

    @pytest.mark.parametrize("keep", [2, -1])
    def test_bad_index(self, keep):
        with pytest.raises(UsageError):
            partial_trace(DensityOperator.maximally_mixed(4, (2, 2)), keep)

    def test_monopartite(self):
        with pytest.raises(UsageError):
            partial_trace(DensityOperator.maximally_mixed(4), 0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_reduction_of_product(self, d1, d2, seed):
        rng = np.random.default_rng(seed)
        a, b = random_density(d1, rng), random_density(d2, rng)
        ab = tensor_product(a, b)
        np.testing.assert_allclose(partial_trace(ab, 0).matrix, a.matrix, atol=1e-9)
        np.testing.assert_allclose(partial_trace(ab, 1).matrix, b.matrix, atol=1e-9)
        assert abs(np.trace(ab.matrix) - 1) < 1e-10
        assert ab.eigenvalues.min() >= 0


class TestCommutator:
    def test_self(self, rng):
        a = random_density(5, rng)
        assert commutator_deviation(a, a) < 1e-12

    def test_diagonal(self):
        assert commutator_deviation(np.diag([0.7, 0.3]), np.diag([0.1, 0.9])) == 0.0

    def test_noncommuting(self):
        plus = DensityOperator.pure(PLUS)
        assert commutator_deviation(DensityOperator.diagonal([1, 0]), plus) == pytest.approx(0.5, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            commutator_deviation(np.eye(2) / 2, np.eye(3) / 3)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_symmetric(self, dim, seed):
        rng = np.random.default_rng(seed)
        a, b = random_density(dim, rng), random_density(dim, rng)
        assert commutator_deviation(a, b) == pytest.approx(commutator_deviation(b, a), abs=1e-15)


class TestMixture:
    def test_single(self):
        rho = density_from_mixture([PLUS], [1.0])
        np.testing.assert_allclose(rho.matrix, 0.5 * np.ones((2, 2)), atol=1e-15)

    def test_symmetric_pair(self):
        rho = density_from_mixture([[1, 0], [0, 1]], [1, 1])
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)

    def test_zero_and_plus(self):
        rho = density_from_mixture([[1, 0], PLUS], [3, 1])
        # (3|0><0| + |+><+|) / 4
        np.testing.assert_allclose(rho.matrix, [[0.875, 0.125], [0.125, 0.125]], atol=1e-15)

    def test_all_zero_weights(self):
        with pytest.raises(DegenerateInputError):
            density_from_mixture([[1, 0]], [0.0])

    def test_unitary_conjugation_preserves_spectrum(self, rng):
        rho = random_density(5, rng)
        u = random_unitary(5, rng)
        rotated = DensityOperator(u @ rho.matrix @ u.conj().T)
        np.testing.assert_allclose(rotated.eigenvalues, rho.eigenvalues, atol=1e-12)
