import numpy as np
import pytest

from eulerchaos.coefficients.fields import DriftField, InteractionKernel, identity_like
from eulerchaos.coefficients.smoothing import Mollifier, chi, cutoff, mollify, mollify_field
from eulerchaos.errors import InvalidArgument


def test_quadrature_is_normalised():
  for dim in [1, 2]:
    nodes, weights = Mollifier(0.1, 9).quadrature(dim)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all(np.linalg.norm(nodes, axis=-1) < 0.1)


def test_density_integrates_to_one():
  moll = Mollifier(0.5)
  x = np.linspace(-0.5, 0.5, 20001)[:, None]
  mass = moll.density(x).sum() * (x[1, 0] - x[0, 0])
  assert mass == pytest.approx(1.0, rel=0.05)


def test_mollified_constant():
  moll = Mollifier(0.2)
  f = mollify_field(DriftField(lambda t, x: np.full(x.shape, 5.0)), moll)
  np.testing.assert_allclose(f(0.0, np.array([[0.0], [3.0]])), 5.0)


def test_mollified_sign():
  eps = 0.1
  f = mollify_field(DriftField(lambda t, x: np.sign(x)), Mollifier(eps))
  assert f(0.0, [0.0])[0] == pytest.approx(0.0, abs=1e-12)
  assert f(0.0, [2 * eps])[0] == pytest.approx(1.0)
  assert f(0.0, [-2 * eps])[0] == pytest.approx(-1.0)


def test_mollified_kernel():
  moll = Mollifier(0.1, 5)
  k = InteractionKernel(lambda t, x, y: np.sign(x - y), lambda t, x, y: identity_like(x))
  smooth = mollify(k, moll)

  assert smooth.cost == 25
  assert smooth.drift(0.0, np.array([[1.0]]), np.array([[0.0]]))[0, 0] == pytest.approx(1.0)
  assert smooth.drift(0.0, np.array([[0.0]]), np.array([[0.0]]))[0, 0] == pytest.approx(0.0, abs=1e-12)
  np.testing.assert_allclose(smooth.diffusion(0.0, np.zeros((2, 1)), np.zeros((2, 1))), 1.0)


def test_chi():
  R = 2.0
  assert chi(np.array([[R / 2]]), R)[0] == 1.0
  assert chi(np.array([[R + 2]]), R)[0] == 0.0

  band = chi(np.array([[R + 0.25], [R + 0.5], [R + 0.75]]), R)
  assert np.all((band > 0) & (band < 1))
  assert np.all(np.diff(band) < 0)
  assert band[1] == pytest.approx(0.5)


def test_cutoff():
  R = 1.0
  f = cutoff(DriftField(lambda t, x: np.full(x.shape, 3.0)), R)
  values = f(0.0, np.array([[0.5], [3.0], [1.5]]))
  assert values[0, 0] == 3.0
  assert values[1, 0] == 0.0
  assert 0 < values[2, 0] < 3.0

  plain = cutoff(lambda t, x, y: identity_like(x), R)
  assert plain(0.0, np.array([[5.0]]), None)[0, 0, 0] == 0.0


def test_invalid_parameters():
  with pytest.raises(InvalidArgument):
    Mollifier(0.0)
  with pytest.raises(InvalidArgument):
    Mollifier(0.1, 0)
  with pytest.raises(InvalidArgument):
    cutoff(lambda t, x: x, -1.0)


@pytest.mark.parametrize("eps", [1.0, 0.01])
def test_mollifier_has_unit_mass(eps):
  moll = Mollifier(eps)
  _, weights = moll.quadrature(1)
  assert weights.sum() == pytest.approx(1.0)

  x = np.linspace(-eps, eps, 20001)[:, None]
  mass = moll.density(x).sum() * (x[1, 0] - x[0, 0])
  assert mass == pytest.approx(1.0, rel=0.05)
