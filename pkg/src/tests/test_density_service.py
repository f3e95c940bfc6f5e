"""
Tests for DensityService: build_density, expectation, reduce, diagonalize,
macro_expectation, purity and entropy. Random cases are compared against the
loop oracles in src/tests/oracles.py.
"""
import numpy as np
import pytest

from src.service.density_service import (
    DensityMatrix,
    DensityService,
    JointCoefficients,
    MacroConditionedOperator,
    joint_coefficients,
)
from src.service.hilbert import Operator, eig_hermitian
from src.service.sampling import random_hermitian, random_joint_coefficients, random_macro_operator
from src.service.util import _load_config
from src.utils.exceptions import (
    DimensionLimitError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    NotHermitianError,
    NotNormalizedError,
    NumericFailureError,
    ValidationError,
)

from src.tests.oracles import (
    full_state_expectation,
    naive_partial_trace,
    outer_product_density,
    triple_loop_macro_expectation,
)

H = np.sqrt(0.5)


@pytest.fixture
def svc():
    return DensityService()


def _random_shapes(rng, count):
    for _ in range(count):
        macro_dim = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        micro_dims = tuple(int(d) for d in rng.integers(1, 4, size=k))
        yield macro_dim, micro_dims


def _assert_density(rho: DensityMatrix):
    m = rho.entries
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    assert abs(np.trace(m) - 1) <= 1e-10
    assert np.linalg.eigvalsh(m)[0] >= -1e-10


# -----------------------------------------------------------------------------
# JointCoefficients
# -----------------------------------------------------------------------------

class TestJointCoefficients:
    def test_flat_input_reshaped_macro_first(self):
        c = joint_coefficients(2, [2], [1, 2, 3, 4])
        assert c.coeffs.shape == (2, 2)
        np.testing.assert_array_equal(c.macro_slices()[1], [3, 4])
        np.testing.assert_array_equal(c.flattened(), [1, 2, 3, 4])

    def test_size_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            joint_coefficients(2, [2], [1, 0, 0])

    def test_empty_micro_dims(self):
        with pytest.raises(ValidationError):
            joint_coefficients(1, [], [1])

    def test_dimension_limit(self):
        with pytest.raises(DimensionLimitError):
            JointCoefficients(macro_dim=2, micro_dims=(64, 64), coeffs=np.zeros(2 * 64 * 64))


# -----------------------------------------------------------------------------
# build_density
# -----------------------------------------------------------------------------

class TestBuildDensity:
    def test_pure_state_projector(self, svc):
        rho = svc.build_density(joint_coefficients(1, [2], [1, 0]))
        np.testing.assert_array_equal(rho.entries, [[1, 0], [0, 0]])

    def test_orthonormal_environment_decoheres(self, svc):
        rho = svc.build_density(joint_coefficients(2, [2], [H, 0, 0, H]))
        np.testing.assert_allclose(rho.entries, np.diag([0.5, 0.5]), atol=1e-15)

    def test_row_index_is_unconjugated(self, svc):
        c = joint_coefficients(1, [2], [H, 1j * H])
        rho = svc.build_density(c)
        assert rho.entries[1, 0] == pytest.approx(1j * 0.5)

    def test_not_normalized(self, svc):
        with pytest.raises(NotNormalizedError) as exc_info:
            svc.build_density(joint_coefficients(1, [2], [1, 1]))
        assert exc_info.value.code == "NOT_NORMALIZED"

    def test_random_matches_outer_products(self, svc, rng):
        for _ in range(50):
            c = random_joint_coefficients(rng, 2, (2, 2))
            rho = svc.build_density(c)
            np.testing.assert_allclose(rho.entries, outer_product_density(c.macro_slices()), atol=1e-12)
            _assert_density(rho)


# -----------------------------------------------------------------------------
# expectation
# -----------------------------------------------------------------------------

class TestExpectation:
    def test_identity_is_one(self, svc, rng):
        c = random_joint_coefficients(rng, 3, (2, 3))
        assert svc.expectation(c, Operator.identity(6)) == pytest.approx(1.0, abs=1e-12)

    def test_pure_zero_state(self, svc):
        c = joint_coefficients(1, [2], [1, 0])
        assert svc.expectation(c, Operator.diagonal([1, -1])) == 1.0

    def test_dimension_mismatch(self, svc):
        c = joint_coefficients(1, [2], [1, 0])
        with pytest.raises(DimensionMismatchError):
            svc.expectation(c, Operator.identity(3))

    def test_non_hermitian(self, svc):
        c = joint_coefficients(1, [2], [1, 0])
        with pytest.raises(NotHermitianError):
            svc.expectation(c, Operator(np.array([[0, 1], [0, 0]])))

    def test_random_matches_full_state_oracle(self, svc, rng):
        for macro_dim, micro_dims in _random_shapes(rng, 500):
            c = random_joint_coefficients(rng, macro_dim, micro_dims)
            a = random_hermitian(rng, c.micro_dim)
            expected = full_state_expectation(c.flattened(), macro_dim, a.matrix)
            assert svc.expectation(c, a) == pytest.approx(expected.real, abs=1e-10)
            _assert_density(svc.build_density(c))

    def test_matches_spectral_sum(self, svc, rng):
        for macro_dim, micro_dims in _random_shapes(rng, 200):
            c = random_joint_coefficients(rng, macro_dim, micro_dims)
            a = random_hermitian(rng, c.micro_dim)
            spectrum = svc.diagonalize(svc.build_density(c))
            v = spectrum.vectors
            expected = sum(
                w * np.vdot(v[:, i], a.matrix @ v[:, i]).real for i, w in enumerate(spectrum.weights)
            )
            assert svc.expectation(c, a) == pytest.approx(expected, abs=1e-9)


# -----------------------------------------------------------------------------
# reduce
# -----------------------------------------------------------------------------

class TestReduce:
    def test_product_state_stays_pure(self, svc):
        # macro-pure (x) |0> (x) |1>
        c = joint_coefficients(1, [2, 2], [0, 1, 0, 0])
        np.testing.assert_array_equal(svc.reduce(c, 1).entries, [[1, 0], [0, 0]])
        np.testing.assert_array_equal(svc.reduce(c, 2).entries, [[0, 0], [0, 1]])

    def test_maximal_entanglement(self, svc):
        c = joint_coefficients(1, [2, 2], [H, 0, 0, H])
        np.testing.assert_allclose(svc.reduce(c, 1).entries, np.eye(2) / 2, atol=1e-15)

    def test_index_out_of_range(self, svc):
        c = joint_coefficients(1, [2, 2], [1, 0, 0, 0])
        for s in (0, 3):
            with pytest.raises(IndexOutOfRangeError):
                svc.reduce(c, s)

    def test_random_matches_naive_partial_trace(self, svc, rng):
        for macro_dim, micro_dims in _random_shapes(rng, 500):
            c = random_joint_coefficients(rng, macro_dim, micro_dims)
            for s in range(1, c.k + 1):
                rho = svc.reduce(c, s)
                assert rho.dim == micro_dims[s - 1]
                np.testing.assert_allclose(rho.entries, naive_partial_trace(np.asarray(c.coeffs), s), atol=1e-10)
                _assert_density(rho)


# -----------------------------------------------------------------------------
# diagonalize / purity / entropy
# -----------------------------------------------------------------------------

class TestDiagonalize:
    def test_maximally_mixed(self, svc):
        spectrum = svc.diagonalize(DensityMatrix(np.diag([0.5, 0.5])))
        np.testing.assert_allclose(spectrum.weights, [0.5, 0.5])
        assert spectrum.purity() == pytest.approx(0.5)
        assert spectrum.entropy() == pytest.approx(np.log(2))

    def test_pure_projector(self, svc):
        spectrum = svc.diagonalize(DensityMatrix(np.diag([0.0, 1.0, 0.0])))
        np.testing.assert_allclose(spectrum.weights, [1, 0, 0], atol=1e-15)
        np.testing.assert_allclose(np.abs(spectrum.vectors[:, 0]), [0, 1, 0], atol=1e-15)
        assert spectrum.entropy() == pytest.approx(0.0, abs=1e-15)

    def test_weights_descending_and_match_eigensolver(self, svc, rng):
        for _ in range(50):
            rho = svc.build_density(random_joint_coefficients(rng, 3, (3,)))
            spectrum = svc.diagonalize(rho)
            assert np.all(np.diff(spectrum.weights) <= 0)
            assert np.all(spectrum.weights >= 0)
            assert spectrum.weights.sum() == pytest.approx(1.0, abs=1e-9)
            raw = eig_hermitian(Operator(rho.entries)).values
            np.testing.assert_allclose(spectrum.weights, np.clip(raw[::-1], 0, None), atol=1e-12)
            rebuilt = spectrum.vectors @ np.diag(spectrum.weights) @ spectrum.vectors.conj().T
            assert np.max(np.abs(rebuilt - rho.entries)) <= 1e-9

    def test_canonical_phase(self, svc, rng):
        rho = svc.build_density(random_joint_coefficients(rng, 2, (2,)))
        vectors = svc.diagonalize(rho).vectors
        for col in range(vectors.shape[1]):
            pivot = vectors[int(np.argmax(np.abs(vectors[:, col]))), col]
            assert pivot.imag == pytest.approx(0.0, abs=1e-15)
            assert pivot.real > 0

    def test_negative_weight_fails(self, svc):
        with pytest.raises(NumericFailureError) as exc_info:
            svc.diagonalize(DensityMatrix(np.diag([1.5, -0.5])))
        assert exc_info.value.code == "NUMERIC_FAILURE"

    def test_trace_not_one_fails(self, svc):
        with pytest.raises(NumericFailureError):
            svc.diagonalize(DensityMatrix(np.diag([0.5, 0.4])))

    def test_tiny_negative_weight_clamped(self):
        svc = DensityService(tolerance=1e-6)
        spectrum = svc.diagonalize(DensityMatrix(np.diag([1.0 + 1e-8, -1e-8])))
        assert spectrum.weights[1] == 0.0

    def test_purity_matches_spectrum(self, svc, rng):
        rho = svc.build_density(random_joint_coefficients(rng, 3, (2, 2)))
        assert svc.purity(rho) == pytest.approx(svc.diagonalize(rho).purity(), abs=1e-12)
        assert 0 <= svc.entropy(rho) <= np.log(4) + 1e-12

    def test_single_macro_value_is_pure(self, svc, rng):
        for micro_dims in [(2,), (3, 2), (2, 2, 2)]:
            rho = svc.build_density(random_joint_coefficients(rng, 1, micro_dims))
            assert svc.purity(rho) == pytest.approx(1.0, abs=1e-12)
            assert svc.entropy(rho) == pytest.approx(0.0, abs=1e-9)


class TestCheckDensity:
    def test_built_density_passes(self, svc, rng):
        svc.check_density(svc.build_density(random_joint_coefficients(rng, 2, (2, 2))))

    def test_as_density_requires_hermitian(self, svc):
        with pytest.raises(NotHermitianError) as exc_info:
            svc.as_density(np.array([[0.5, 0.5], [0.0, 0.5]]))
        assert exc_info.value.code == "NOT_HERMITIAN"
        assert svc.as_density(np.diag([0.5, 0.5])).dim == 2

    def test_negative_eigenvalue_fails(self, svc):
        with pytest.raises(NumericFailureError):
            svc.check_density(DensityMatrix(np.diag([1.5, -0.5])))


# -----------------------------------------------------------------------------
# macro_expectation
# -----------------------------------------------------------------------------

class TestMacroExpectation:
    def test_identity_blocks(self, svc, rng):
        c = random_joint_coefficients(rng, 3, (2, 2))
        b = MacroConditionedOperator.uniform(Operator.identity(4), 3)
        assert svc.macro_expectation(c, b) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_macro_support(self, svc, rng):
        c = joint_coefficients(2, [2], [0, 0, H, H])
        b0 = random_hermitian(rng, 2).matrix
        b = MacroConditionedOperator(np.stack([b0, np.zeros((2, 2))]))
        assert svc.macro_expectation(c, b) == 0.0

    def test_uniform_blocks_reduce_to_expectation(self, svc, rng):
        for _ in range(20):
            c = random_joint_coefficients(rng, 2, (3,))
            a = random_hermitian(rng, 3)
            b = MacroConditionedOperator.uniform(a, 2)
            assert svc.macro_expectation(c, b) == pytest.approx(svc.expectation(c, a), abs=1e-10)

    def test_random_matches_triple_loop(self, svc, rng):
        for macro_dim, micro_dims in _random_shapes(rng, 200):
            c = random_joint_coefficients(rng, macro_dim, micro_dims)
            b = random_macro_operator(rng, macro_dim, c.micro_dim)
            expected = triple_loop_macro_expectation(c.macro_slices(), b.blocks)
            assert svc.macro_expectation(c, b) == pytest.approx(expected.real, abs=1e-10)

    def test_macro_dim_mismatch(self, svc):
        c = joint_coefficients(2, [2], [1, 0, 0, 0])
        b = MacroConditionedOperator.uniform(Operator.identity(2), 3)
        with pytest.raises(DimensionMismatchError):
            svc.macro_expectation(c, b)

    def test_block_dim_mismatch(self, svc):
        c = joint_coefficients(1, [2], [1, 0])
        b = MacroConditionedOperator.uniform(Operator.identity(3), 1)
        with pytest.raises(DimensionMismatchError):
            svc.macro_expectation(c, b)

    def test_non_hermitian_block(self, svc):
        c = joint_coefficients(1, [2], [1, 0])
        b = MacroConditionedOperator(np.array([[[0, 1], [0, 0]]]))
        with pytest.raises(NotHermitianError):
            svc.macro_expectation(c, b)


class TestTolerance:
    def test_explicit_tolerance_range(self):
        assert DensityService(tolerance=1e-3).tolerance == 1e-3
        with pytest.raises(ValidationError):
            DensityService(tolerance=0.0)
        with pytest.raises(ValidationError):
            DensityService(tolerance=1e-2)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("HIERQ_TOLERANCE", "1e-6")
        _load_config.cache_clear()
        assert DensityService().tolerance == 1e-6

    def test_loose_tolerance_accepts_rounded_input(self):
        c = joint_coefficients(1, [2], [1.0 + 1e-7, 0])
        with pytest.raises(NotNormalizedError):
            DensityService().build_density(c)
        DensityService(tolerance=1e-6).build_density(c)
