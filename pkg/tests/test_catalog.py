import numpy as np
import pytest

from eulerchaos.brownian import StreamKey
from eulerchaos.coefficients.catalog import catalog_names, load_interaction, load_kernel, load_model
from eulerchaos.coefficients.fields import InteractionKernel, MeasureCoefficient, growth_audit
from eulerchaos.errors import InvalidArgument
from eulerchaos.meanfield.measure import EmpiricalMeasure


def test_load_model_params():
  model = load_model("ou", {'theta': '2', 'sigma': '0.5'}, dim=2)
  assert model.params.theta == 2.0 and model.params.sigma == 0.5

  x = np.array([[1.0, -1.0]])
  np.testing.assert_allclose(model.drift(0.0, x), [[-2.0, 2.0]])
  np.testing.assert_allclose(model.diffusion(0.0, x)[0], np.eye(2) * 0.5)


def test_unknown_entries():
  with pytest.raises(InvalidArgument):
    load_model("frobnicate")
  with pytest.raises(InvalidArgument):
    load_model("ou", {'gamma': 1})
  with pytest.raises(InvalidArgument):
    load_model("ou", {'theta': 'abc'})
  with pytest.raises(InvalidArgument):
    load_kernel("ou")


@pytest.mark.parametrize("name", ["constant", "ou", "sign_drift", "sign_switch", "gbm"])
def test_models_respect_growth_bound(name):
  model = load_model(name, dim=2)
  assert growth_audit((model.drift, model.diffusion), 2, StreamKey(1), probes=10**4).passed


@pytest.mark.parametrize("name", ["mean", "bounded_discontinuous", "attractive", "independent_ou"])
def test_kernels_respect_growth_bound(name):
  kernel = load_kernel(name, dim=1)
  assert growth_audit(kernel, 1, StreamKey(1), probes=10**4).passed


def test_sign_switch_diffusion():
  model = load_model("sign_switch")
  sigma = model.diffusion(0.0, np.array([[-1.0], [1.0]]))
  np.testing.assert_array_equal(sigma[:, 0, 0], [1.0, 1.5])


@pytest.mark.parametrize("name", ["mean", "attractive", "independent_ou"])
def test_closed_forms_match_averages(name):
  kernel = load_kernel(name)
  atoms = np.random.default_rng(3).standard_normal((50, 1))
  mu = EmpiricalMeasure(atoms)
  x = np.array([[0.5], [-1.0]])

  averaged = np.mean(kernel.drift(0.0, x[:, None, :], atoms[None]), axis=1)
  np.testing.assert_allclose(kernel.mean_field(0.0, x, mu), averaged, atol=1e-12)
  np.testing.assert_allclose(kernel.mean_diffusion(0.0, x, mu),
    np.mean(kernel.diffusion(0.0, x[:, None, :], atoms[None]), axis=1), atol=1e-12)


def test_interaction_namespace():
  assert isinstance(load_interaction("mean"), InteractionKernel)
  coefficient = load_interaction("mean_field_ou", {'theta': 1.0})
  assert isinstance(coefficient, MeasureCoefficient)

  mu = EmpiricalMeasure([1.0, 3.0])
  assert coefficient.drift(0.0, np.array([[2.0]]), mu)[0, 0] == 0.0

  names = catalog_names()
  assert "mean_field_ou" in names.kernels and "ou" in names.models


def test_mean_kernel_with_zero_scale_does_not_interact():
  assert not load_kernel("mean", {'scale': 0.0}).interacting
  assert load_kernel("mean").interacting
