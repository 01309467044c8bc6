import numpy as np
import pytest

from eulerchaos.brownian import StreamKey
from eulerchaos.errors import InvalidArgument, Unsupported
from eulerchaos.meanfield.measure import EmpiricalMeasure, empirical, measure_moment, wasserstein


def test_empirical():
  mu = empirical([1.0, 3.0])
  np.testing.assert_array_equal(mu.atoms[:, 0], [1.0, 3.0])
  np.testing.assert_array_equal(mu.weights, [0.5, 0.5])
  assert mu.uniform and len(mu) == 2 and mu.dim == 1


def test_single_atom():
  mu = empirical([[2.0, -1.0]])
  assert len(mu) == 1
  np.testing.assert_array_equal(mu.mean, [2.0, -1.0])
  np.testing.assert_array_equal(mu.weights, [1.0])


def test_empty():
  with pytest.raises(InvalidArgument):
    empirical([])
  with pytest.raises(InvalidArgument):
    EmpiricalMeasure(np.zeros((0, 2)))


def test_bad_weights():
  with pytest.raises(InvalidArgument):
    EmpiricalMeasure([0.0, 1.0], weights=[0.5, 0.6])
  with pytest.raises(InvalidArgument):
    EmpiricalMeasure([0.0, 1.0], weights=[1.5, -0.5])
  with pytest.raises(InvalidArgument):
    EmpiricalMeasure([0.0, 1.0], weights=[1.0])


def test_mean():
  mu = EmpiricalMeasure([[0.0, 1.0], [2.0, 3.0]])
  np.testing.assert_allclose(mu.mean, [1.0, 2.0])

  weighted = EmpiricalMeasure([[0.0], [4.0]], weights=[0.75, 0.25])
  np.testing.assert_allclose(weighted.mean, [1.0])


def test_canonical_order():
  atoms = np.array([[1.0, 0.0], [0.0, 5.0], [1.0, -1.0], [0.0, 2.0]])
  canonical = EmpiricalMeasure(atoms).canonical()
  np.testing.assert_array_equal(canonical.atoms, [[0.0, 2.0], [0.0, 5.0], [1.0, -1.0], [1.0, 0.0]])

  shuffled = EmpiricalMeasure(atoms[[2, 0, 3, 1]]).canonical()
  np.testing.assert_array_equal(canonical.atoms, shuffled.atoms)


def test_measure_moment():
  assert measure_moment(empirical([1.0, -1.0]), 2) == pytest.approx(1.0)
  assert measure_moment(empirical([0.0, 2.0]), 1) == pytest.approx(1.0)
  assert measure_moment(empirical([0.0]), 3) == 0.0

  with pytest.raises(InvalidArgument):
    measure_moment(empirical([1.0]), 0.5)


def test_wasserstein_examples():
  mu = empirical([0.3, -1.0, 2.0])
  assert wasserstein(mu, mu) == 0.0
  assert wasserstein(empirical([0.0]), empirical([1.0])) == pytest.approx(1.0)
  assert wasserstein(empirical([0.0, 1.0]), empirical([1.0, 2.0])) == pytest.approx(1.0)
  assert wasserstein(empirical([1.0, 0.0]), empirical([2.0, 1.0]), order=2) == pytest.approx(1.0)


def test_wasserstein_unequal_counts():
  # {0, 1} vs {0, 0, 3}: quantile pairing gives |0-0|/3 + |0-0|/6 + |1-0|/6 + |1-3|/3
  value = wasserstein(empirical([0.0, 1.0]), empirical([0.0, 0.0, 3.0]))
  assert value == pytest.approx(1 / 6 + 2 / 3)


def test_wasserstein_weighted_equal_counts():
  mu = EmpiricalMeasure([0.0, 1.0], weights=[0.25, 0.75])
  nu = EmpiricalMeasure([0.0, 1.0], weights=[0.75, 0.25])
  assert wasserstein(mu, nu) == pytest.approx(0.5)


def test_wasserstein_unsupported():
  mu = EmpiricalMeasure([0.0, 1.0], weights=[0.25, 0.75])
  with pytest.raises(Unsupported):
    wasserstein(mu, empirical([0.0, 1.0, 2.0]))


def test_wasserstein_invalid():
  with pytest.raises(InvalidArgument):
    wasserstein(empirical([0.0]), empirical([1.0]), order=3)
  with pytest.raises(InvalidArgument):
    wasserstein(empirical([[0.0, 0.0]]), empirical([1.0]))


def test_sliced_wasserstein():
  atoms = np.random.default_rng(0).standard_normal((100, 2))
  mu, shifted = EmpiricalMeasure(atoms), EmpiricalMeasure(atoms + np.array([1.0, 0.0]))

  assert wasserstein(mu, mu) == 0.0
  first = wasserstein(mu, shifted)
  assert first == wasserstein(mu, shifted)
  assert 0 < first < 1.0

  other = wasserstein(mu, shifted, key=StreamKey(1))
  assert other != first
