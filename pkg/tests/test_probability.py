import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infocount.errors import DimensionMismatch, NegativeProbability, NotNormalized
from infocount.probability import (
    Alphabet,
    ConditionalKernel,
    Distribution,
    JointDistribution,
    conditional_from_joint,
    joint_from_input_and_kernel,
    output_distribution,
    validate_distribution,
)

from conftest import prob_vectors, random_doubly_stochastic

BSC = [[0.9, 0.1], [0.1, 0.9]]


class TestAlphabet:
    def test_default_labels(self):
        assert Alphabet.default(3).symbols == ("0", "1", "2")

    def test_rejects_duplicates_and_empty(self):
        with pytest.raises(ValueError):
            Alphabet(("a", "a"))
        with pytest.raises(DimensionMismatch):
            Alphabet(())


class TestValidateDistribution:
    def test_uniform_pair(self):
        d = validate_distribution([0.5, 0.5])
        assert d.probs.tolist() == [0.5, 0.5]

    def test_channel_row(self):
        d = validate_distribution([0.9, 0.1])
        np.testing.assert_allclose(d.probs, [0.9, 0.1])

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            validate_distribution([0.5, 0.6])

    def test_negative(self):
        with pytest.raises(NegativeProbability):
            validate_distribution([1.5, -0.5])

    def test_slop_within_tolerance_is_renormalized(self):
        d = validate_distribution([0.5 + 4e-10, 0.5])
        assert d.probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_slop_beyond_tolerance(self):
        with pytest.raises(NotNormalized):
            validate_distribution([0.5 + 2e-9, 0.5])

    def test_immutable(self):
        d = validate_distribution([0.5, 0.5])
        with pytest.raises(ValueError):
            d.probs[0] = 1.0

    def test_alphabet_size_must_match(self):
        with pytest.raises(DimensionMismatch):
            validate_distribution([0.5, 0.5], ["a", "b", "c"])

    def test_json_roundtrip(self):
        d = validate_distribution([0.25, 0.75], ["x", "y"])
        obj = d.to_json()
        assert obj == {"alphabet": ["x", "y"], "probs": [0.25, 0.75]}
        assert Distribution.from_json(obj).probs.tolist() == [0.25, 0.75]


class TestJoint:
    def test_degenerate(self):
        j = joint_from_input_and_kernel([1.0], [[1.0]])
        assert j.probs.tolist() == [[1.0]]

    def test_noiseless(self):
        j = joint_from_input_and_kernel([0.5, 0.5], np.eye(2))
        assert j.probs.tolist() == [[0.5, 0.0], [0.0, 0.5]]

    def test_bsc(self):
        j = joint_from_input_and_kernel([0.5, 0.5], BSC)
        np.testing.assert_allclose(j.probs, [[0.45, 0.05], [0.05, 0.45]], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            joint_from_input_and_kernel([1 / 3] * 3, BSC)

    def test_marginals(self):
        j = JointDistribution([[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_allclose(j.marginal_x().probs, [0.3, 0.7])
        np.testing.assert_allclose(j.marginal_y().probs, [0.4, 0.6])


class TestOutputDistribution:
    def test_example_one_channel(self):
        q = output_distribution([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
        assert q.probs.tolist() == [0.5, 0.5]

    def test_bsc_uniform(self):
        q = output_distribution([0.5, 0.5], BSC)
        np.testing.assert_allclose(q.probs, [0.5, 0.5], atol=1e-15)
        # 10000 uniform letters through the channel stay balanced on average
        np.testing.assert_allclose(10_000 * q.probs, [5000, 5000])

    def test_bsc_skewed(self):
        q = output_distribution([0.9, 0.1], BSC)
        np.testing.assert_allclose(q.probs, [0.82, 0.18], atol=1e-15)


class TestConditionalFromJoint:
    def test_identity(self):
        k = conditional_from_joint(JointDistribution([[0.5, 0], [0, 0.5]]), given="y")
        np.testing.assert_array_equal(k.rows, np.eye(2))

    def test_independent(self):
        k = conditional_from_joint(JointDistribution(np.full((2, 2), 0.25)), given="y")
        np.testing.assert_array_equal(k.rows, np.full((2, 2), 0.5))

    def test_bsc_rows(self):
        k = conditional_from_joint(JointDistribution([[0.45, 0.05], [0.05, 0.45]]), given="x")
        np.testing.assert_allclose(k.rows, BSC, atol=1e-15)

    def test_zero_marginal_row_is_flagged(self):
        k = conditional_from_joint(JointDistribution([[0.5, 0.5], [0.0, 0.0]]), given="x")
        assert k.defined.tolist() == [True, False]
        assert np.isnan(k.rows[1]).all()

    def test_undefined_row_with_zero_weight_is_usable(self):
        k = conditional_from_joint(JointDistribution([[0.5, 0.5], [0.0, 0.0]]), given="x")
        j = joint_from_input_and_kernel([1.0, 0.0], k)
        assert j.probs.tolist() == [[0.5, 0.5], [0.0, 0.0]]

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            conditional_from_joint(JointDistribution([[1.0]]), given="z")


def _kernel(rng, n, m):
    return ConditionalKernel(rng.dirichlet(np.ones(m), size=n))


@settings(max_examples=200, deadline=None)
@given(d=prob_vectors(1, 5), m=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_output_is_joint_column_sums(d, m, seed):
    k = _kernel(np.random.default_rng(seed), d.size, m)
    j = joint_from_input_and_kernel(d, k)
    q = output_distribution(d, k)
    np.testing.assert_allclose(j.probs.sum(axis=0), q.probs, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(d=prob_vectors(1, 5), m=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_conditioning_recovers_kernel(d, m, seed):
    k = _kernel(np.random.default_rng(seed), d.size, m)
    back = conditional_from_joint(joint_from_input_and_kernel(d, k), given="x")
    # below ~1e-250 the joint entries P(x) W(y|x) go subnormal and the row
    # is no longer recoverable from the joint in binary64
    pos = d > 1e-250
    np.testing.assert_allclose(back.rows[pos], k.rows[pos], atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_uniform_through_doubly_stochastic_is_uniform(rng, n):
    for _ in range(20):
        k = random_doubly_stochastic(rng, n)
        q = output_distribution(Distribution.uniform(n), k)
        np.testing.assert_allclose(q.probs, np.full(n, 1 / n), atol=1e-12)
