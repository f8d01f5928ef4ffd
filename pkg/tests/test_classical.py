import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsem.classical import (
    JointDistribution,
    ProbabilityDistribution,
    bhattacharyya,
    expected_value,
    kl_divergence,
    mutual_information,
    shannon_entropy,
    smooth,
)
from dsem.errors import UsageError, ValidationError


def probs(n):
    return st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n).filter(lambda v: sum(v) > 1e-3).map(
        lambda v: np.asarray(v) / sum(v))


class TestDistributions:
    @pytest.mark.parametrize("p", [[0.5, 0.6], [1.2, -0.2], [], [[0.5, 0.5]]])
    def test_invalid(self, p):
        with pytest.raises(ValidationError):
            ProbabilityDistribution(p)

    def test_outcome_length(self):
        with pytest.raises(ValidationError):
            ProbabilityDistribution([0.5, 0.5], outcomes=[1.0])

    def test_joint_marginals(self):
        j = JointDistribution([[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_allclose(j.marginal_x().probs, [0.3, 0.7])
        np.testing.assert_allclose(j.marginal_y().probs, [0.4, 0.6])

    def test_joint_invalid(self):
        with pytest.raises(ValidationError):
            JointDistribution([[0.5, 0.5], [0.5, 0.5]])


@pytest.mark.parametrize("p,expected", [
    ([1.0], 0.0),
    ([0.5, 0.5], 1.0),
    ([0.75, 0.25], 0.8112781244591328),
    ([0.5, 0.25, 0.25, 0.0], 1.5),
])
def test_shannon_entropy(p, expected):
    assert shannon_entropy(p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 64])
def test_uniform_entropy(n):
    assert abs(shannon_entropy(np.full(n, 1 / n)) - math.log2(n)) < 1e-12


@pytest.mark.parametrize("outcomes,p,expected", [
    ([5.0], [1.0], 5.0),
    ([0.0, 1.0], [0.5, 0.5], 0.5),
    ([1.0, 2.0, 3.0], [0.2, 0.3, 0.5], 2.3),
])
def test_expected_value(outcomes, p, expected):
    assert expected_value(ProbabilityDistribution(p, outcomes)) == pytest.approx(expected, abs=1e-12)


def test_expected_value_needs_outcomes():
    with pytest.raises(UsageError):
        expected_value(ProbabilityDistribution([0.5, 0.5]))


@pytest.mark.parametrize("x,y,expected", [
    ([0.3, 0.7], [0.3, 0.7], 1.0),
    ([1.0, 0.0], [0.0, 1.0], 0.0),
    ([0.5, 0.5], [0.9, 0.1], math.sqrt(0.45) + math.sqrt(0.05)),
])
def test_bhattacharyya(x, y, expected):
    assert bhattacharyya(x, y) == pytest.approx(expected, abs=1e-12)


def test_bhattacharyya_length_mismatch():
    with pytest.raises(UsageError):
        bhattacharyya([1.0], [0.5, 0.5])


@pytest.mark.parametrize("x,y,expected", [
    ([0.2, 0.8], [0.2, 0.8], 0.0),
    ([1.0, 0.0], [0.0, 1.0], math.inf),
    ([0.5, 0.5], [0.25, 0.75], 0.5 + 0.5 * math.log2(2 / 3)),
    ([0.0, 1.0], [0.5, 0.5], 1.0),
])
def test_kl_divergence(x, y, expected):
    assert kl_divergence(x, y) == pytest.approx(expected, abs=1e-12)


def test_kl_asymmetric():
    x, y = [0.5, 0.5], [0.9, 0.1]
    assert kl_divergence(x, y) != pytest.approx(kl_divergence(y, x))


def test_kl_smoothing_is_finite_and_grows_as_eps_shrinks():
    vals = [kl_divergence([1.0, 0.0], [0.0, 1.0], smoothing=e) for e in (1e-3, 1e-6, 1e-9)]
    assert all(math.isfinite(v) for v in vals)
    assert vals[0] < vals[1] < vals[2]


def test_smooth():
    np.testing.assert_allclose(smooth([1.0, 0.0], 0.5), [2 / 3, 1 / 3])


@pytest.mark.parametrize("table,expected", [
    (np.full((2, 2), 0.25), 0.0),
    (np.diag([0.5, 0.5]), 1.0),
    ([[0.4, 0.1], [0.1, 0.4]], 2 - (2 * 0.4 * math.log2(1 / 0.4) + 2 * 0.1 * math.log2(1 / 0.1))),
])
def test_mutual_information(table, expected):
    j = JointDistribution(table)
    for method in ("entropy", "logratio"):
        assert mutual_information(j, method) == pytest.approx(expected, abs=1e-10)


def test_mutual_information_value():
    assert mutual_information(JointDistribution([[0.4, 0.1], [0.1, 0.4]])) == pytest.approx(0.278071905, abs=1e-9)


def test_mutual_information_bad_method():
    with pytest.raises(UsageError):
        mutual_information(JointDistribution([[1.0]]), "nope")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_mutual_information_forms_agree(n, m, seed):
    rng = np.random.default_rng(seed)
    t = rng.random((n, m)) * (rng.random((n, m)) > 0.3)
    if t.sum() == 0:
        t[0, 0] = 1.0
    j = JointDistribution(t / t.sum())
    a, b = mutual_information(j, "entropy"), mutual_information(j, "logratio")
    assert abs(a - b) < 1e-10
    assert a >= -1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(probs(n), probs(n))))
def test_pairwise_properties(pair):
    x, y = pair
    assert bhattacharyya(x, y) == pytest.approx(bhattacharyya(y, x), abs=1e-14)
    assert 0.0 <= bhattacharyya(x, y) <= 1.0
    kl = kl_divergence(x, y)
    assert kl >= -1e-12
    assert 0.0 <= shannon_entropy(x) <= math.log2(len(x)) + 1e-12
