""" Builtin coefficient catalog, addressable by name and a parameter dict.

Each entry pairs a parameter schema (a dataclass merged with omegaconf, so
unknown or mistyped parameters are rejected) with a constructor taking the
state dimension.
"""
from dataclasses import dataclass

import numpy as np
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException
from structs.struct import struct

from eulerchaos.errors import InvalidArgument
from .fields import CoefficientBounds, DiffusionField, DriftField, InteractionKernel,\
  MeasureCoefficient, identity_like, vector_norm


def merge_params(params, schema):
  try:
    merged = OmegaConf.merge(OmegaConf.structured(schema), params or {})
  except OmegaConfBaseException as e:
    raise InvalidArgument(f"bad parameters for {schema.__name__}: {e.msg or e}") from e
  return struct(**OmegaConf.to_container(merged))


def load_entry(table, kind, name, params=None, **kwargs):
  if name not in table:
    raise InvalidArgument(f"unknown {kind} '{name}', options are ({' | '.join(table.keys())})")

  schema, constructor = table[name]
  return constructor(**merge_params(params, schema), **kwargs)


def switch(x):
  """ 1 + ½·1_{x₁ > 0} """
  return 1.0 + 0.5 * (x[..., 0] > 0)


def model(name, drift, diffusion, params, **kwargs):
  return struct(name=name, drift=drift, diffusion=diffusion, params=params, **kwargs)


@dataclass
class ConstantParams:
  b0: float = 0.0
  s0: float = 1.0

def constant(dim, b0=0.0, s0=1.0):
  bounds = CoefficientBounds(c0=max(1.0, abs(b0) * np.sqrt(dim) + abs(s0)),
    c1=s0 ** (2 * dim) if s0 != 0 else 1.0)

  drift = DriftField(lambda t, x: np.full(x.shape, float(b0)), bounds, name="constant")
  diffusion = DiffusionField(lambda t, x: identity_like(x, s0), bounds,
    name="constant", nondegenerate=s0 != 0)
  return model("constant", drift, diffusion, struct(b0=b0, s0=s0))


@dataclass
class OUParams:
  theta: float = 1.0
  sigma: float = 1.0

def ou(dim, theta=1.0, sigma=1.0):
  bounds = CoefficientBounds(c0=max(1.0, abs(theta), abs(sigma)),
    c1=sigma ** (2 * dim) if sigma != 0 else 1.0)

  drift = DriftField(lambda t, x: -theta * x, bounds, name="ou")
  diffusion = DiffusionField(lambda t, x: identity_like(x, sigma), bounds,
    name="ou", nondegenerate=sigma != 0)
  return model("ou", drift, diffusion, struct(theta=theta, sigma=sigma))


@dataclass
class SignParams:
  a: float = 1.0

def sign_drift(dim, a=1.0):
  bounds = CoefficientBounds(c0=abs(a) * np.sqrt(dim) + 1.0, c1=1.0)

  drift = DriftField(lambda t, x: -a * np.sign(x), bounds, name="sign_drift")
  diffusion = DiffusionField(lambda t, x: identity_like(x), bounds,
    name="identity", nondegenerate=True)
  return model("sign_drift", drift, diffusion, struct(a=a))


def sign_switch(dim, a=1.0):
  bounds = CoefficientBounds(c0=abs(a) * np.sqrt(dim) + 1.5, c1=1.0)

  drift = DriftField(lambda t, x: -a * np.sign(x), bounds, name="sign_drift")
  diffusion = DiffusionField(lambda t, x: identity_like(x) * switch(x)[..., None, None],
    bounds, name="switch", nondegenerate=True)
  return model("sign_switch", drift, diffusion, struct(a=a))


@dataclass
class GBMParams:
  mu: float = 0.05
  sigma: float = 0.2

def gbm(dim, mu=0.05, sigma=0.2):
  bounds = CoefficientBounds(c0=max(1.0, abs(mu) + abs(sigma)))

  drift = DriftField(lambda t, x: mu * x, bounds, name="gbm")
  diffusion = DiffusionField(lambda t, x: sigma * x[..., :, None] * np.eye(x.shape[-1]),
    bounds, name="gbm", nondegenerate=False)
  return model("gbm", drift, diffusion, struct(mu=mu, sigma=sigma))


models = dict(
  constant=(ConstantParams, constant),
  ou=(OUParams, ou),
  sign_drift=(SignParams, sign_drift),
  sign_switch=(SignParams, sign_switch),
  gbm=(GBMParams, gbm)
)


def load_model(name, params=None, dim=1):
  return load_entry(models, "model", name, params, dim=dim)


@dataclass
class MeanKernelParams:
  scale: float = 1.0

def mean_kernel(dim, scale=1.0):
  """ b̄(x, y) = scale·y, σ̄ = I """
  bounds = CoefficientBounds(c0=max(1.0, abs(scale)) + 1.0, c1=1.0)

  def drift_kernel(t, x, y):
    return np.broadcast_to(scale * y, np.broadcast_shapes(x.shape, y.shape))

  def diffusion_kernel(t, x, y):
    return identity_like(np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)))

  def mean_field(t, x, mu):
    return np.broadcast_to(scale * mu.mean, np.asarray(x).shape)

  def mean_diffusion(t, x, mu):
    return identity_like(x)

  return InteractionKernel(drift_kernel, diffusion_kernel, bounds, name="mean",
    mean_field=mean_field, interacting=scale != 0, mean_diffusion=mean_diffusion)


@dataclass
class EmptyParams:
  pass

def bounded_discontinuous(dim):
  """ b̄(x, y) = sign(x - y), σ̄ = (1 + ½·1_{|y|<1}) I """
  bounds = CoefficientBounds(c0=np.sqrt(dim) + 1.5, c1=1.0)

  def drift_kernel(t, x, y):
    return np.sign(x - y)

  def diffusion_kernel(t, x, y):
    y = np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape))
    scale = 1.0 + 0.5 * (vector_norm(y) < 1)
    return identity_like(y) * scale[..., None, None]

  return InteractionKernel(drift_kernel, diffusion_kernel, bounds, name="bounded_discontinuous")


@dataclass
class AttractiveParams:
  theta: float = 1.0
  sigma: float = 1.0

def attractive(dim, theta=1.0, sigma=1.0):
  """ b̄(x, y) = -θ(x - y), σ̄ = σI: Lipschitz attraction towards the other particles """
  bounds = CoefficientBounds(c0=max(1.0, abs(theta), abs(sigma)) * 2, c1=sigma ** (2 * dim) if sigma != 0 else 1.0)

  def drift_kernel(t, x, y):
    return -theta * (x - y)

  def diffusion_kernel(t, x, y):
    return identity_like(np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)), sigma)

  def mean_field(t, x, mu):
    return -theta * (np.asarray(x) - mu.mean)

  def mean_diffusion(t, x, mu):
    return identity_like(x, sigma)

  return InteractionKernel(drift_kernel, diffusion_kernel, bounds, name="attractive",
    mean_field=mean_field, interacting=theta != 0, mean_diffusion=mean_diffusion)


def independent_ou(dim, theta=1.0, sigma=1.0):
  """ b̄(x, y) = -θx, σ̄ = σI: no dependence on y """
  bounds = CoefficientBounds(c0=max(1.0, abs(theta), abs(sigma)), c1=sigma ** (2 * dim) if sigma != 0 else 1.0)

  def drift_kernel(t, x, y):
    return np.broadcast_to(-theta * x, np.broadcast_shapes(x.shape, y.shape))

  def diffusion_kernel(t, x, y):
    return identity_like(np.broadcast_to(x, np.broadcast_shapes(x.shape, y.shape)), sigma)

  def mean_field(t, x, mu):
    return -theta * np.asarray(x)

  def mean_diffusion(t, x, mu):
    return identity_like(x, sigma)

  return InteractionKernel(drift_kernel, diffusion_kernel, bounds, name="independent_ou",
    mean_field=mean_field, interacting=False, mean_diffusion=mean_diffusion)


kernels = dict(
  mean=(MeanKernelParams, mean_kernel),
  bounded_discontinuous=(EmptyParams, bounded_discontinuous),
  attractive=(AttractiveParams, attractive),
  independent_ou=(OUParams, independent_ou)
)


def load_kernel(name, params=None, dim=1):
  return load_entry(kernels, "kernel", name, params, dim=dim)


def mean_field_ou(dim, theta=1.0, sigma=1.0):
  """ b(x, μ) = -θ(x - mean μ), σ = σI, written directly against the measure """
  bounds = CoefficientBounds(c0=max(1.0, abs(theta), abs(sigma)), c1=sigma ** (2 * dim) if sigma != 0 else 1.0)

  def drift(t, x, mu):
    return -theta * (np.asarray(x) - mu.mean)

  def diffusion(t, x, mu):
    return identity_like(x, sigma)

  return MeasureCoefficient(drift, diffusion, bounds, name="mean_field_ou")


measure_coefficients = dict(
  mean_field_ou=(OUParams, mean_field_ou)
)


def load_interaction(name, params=None, dim=1):
  """ Interaction kernels and direct measure coefficients share one namespace """
  if name in measure_coefficients:
    return load_entry(measure_coefficients, "kernel", name, params, dim=dim)
  return load_entry(kernels, "kernel", name, params, dim=dim)


def catalog_names():
  return struct(models=list(models), kernels=list(kernels) + list(measure_coefficients))
