from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from structs.struct import struct

from eulerchaos.errors import InvalidArgument, Unsupported
from eulerchaos.reduce import ordered_mean
from eulerchaos.threading import chunk_ranges

# Pairwise evaluations materialised at once when averaging a kernel over atoms
max_pairs = 2 ** 20


@dataclass(frozen=True)
class CoefficientBounds:
  """ Declared constants of a coefficient family.
  kappa0/kappa1 bound discretized Ito coefficients, c0 is the linear growth
  constant and c1 the nondegeneracy constant, beta the moment order.
  """
  kappa0: float = 1.0
  kappa1: float = 1.0
  c0: float = 1.0
  c1: float = 1.0
  beta: float = 2.0

  def __post_init__(self):
    for k in ['kappa0', 'kappa1', 'c0', 'c1']:
      v = getattr(self, k)
      if not (np.isfinite(v) and v > 0):
        raise InvalidArgument(f"CoefficientBounds: {k} must be positive, got {v}")

    if not self.beta >= 1:
      raise InvalidArgument(f"CoefficientBounds: beta must be >= 1, got {self.beta}")


def operator_norm(m):
  """ Spectral norm of (..., d, d) matrices """
  m = np.asarray(m)
  if m.shape[-1] == 1:
    return np.abs(m[..., 0, 0])
  return np.linalg.norm(m, ord=2, axis=(-2, -1))


def vector_norm(v):
  return np.linalg.norm(np.asarray(v), axis=-1)


def gram_det(sigma):
  """ det(σσ*) for (..., d, d), explicit for d <= 3 """
  sigma = np.asarray(sigma)
  d = sigma.shape[-1]
  if d <= 3:
    return np.linalg.det(sigma) ** 2

  gram = sigma @ np.swapaxes(sigma, -1, -2)
  chol = np.linalg.cholesky(gram)
  return np.prod(np.diagonal(chol, axis1=-2, axis2=-1), axis=-1) ** 2


def identity_like(x, scale=1.0):
  """ scale * I broadcast to the batch shape of points x (..., d) """
  x = np.asarray(x)
  d = x.shape[-1]
  return np.broadcast_to(np.eye(d) * scale, (*x.shape[:-1], d, d))


def as_points(x):
  return np.atleast_1d(np.asarray(x, dtype=np.float64))


class DriftField(object):
  """ Measurable drift b_t(x), vectorised over leading axes of x (..., d) """

  def __init__(self, evaluator : Callable, bounds : CoefficientBounds = CoefficientBounds(), name="drift"):
    self.evaluator = evaluator
    self.bounds = bounds
    self.name = name

  def __call__(self, t, x):
    x = as_points(x)
    return np.broadcast_to(self.evaluator(t, x), x.shape)

  def __repr__(self):
    return f"DriftField({self.name})"

  def with_evaluator(self, evaluator, name=None):
    return DriftField(evaluator, self.bounds, name or self.name)


class DiffusionField(object):
  """ Measurable diffusion σ_t(x) returning (..., d, d) matrices """

  def __init__(self, evaluator : Callable, bounds : CoefficientBounds = CoefficientBounds(),
      name="diffusion", nondegenerate=False):
    self.evaluator = evaluator
    self.bounds = bounds
    self.name = name
    self.nondegenerate = nondegenerate

  def __call__(self, t, x):
    x = as_points(x)
    d = x.shape[-1]
    return np.broadcast_to(self.evaluator(t, x), (*x.shape[:-1], d, d))

  def __repr__(self):
    return f"DiffusionField({self.name})"

  def with_evaluator(self, evaluator, name=None):
    return DiffusionField(evaluator, self.bounds, name or self.name, self.nondegenerate)


class InteractionKernel(object):
  """ Two-point coefficients (b̄_t(x, y), σ̄_t(x, y)), x and y broadcast
  against each other. `mean_field` and `mean_diffusion` optionally give the
  closed forms of b_t(x, μ) and σ_t(x, μ) in terms of the measure, `cost`
  is the number of raw evaluations behind each pair (mollified kernels
  evaluate many).
  interacting=False declares that neither coefficient depends on y, so
  simulators may evaluate (b̄(x, x), σ̄(x, x)) without averaging.
  """

  def __init__(self, drift_kernel : Callable, diffusion_kernel : Callable,
      bounds : CoefficientBounds = CoefficientBounds(), name="kernel",
      mean_field : Optional[Callable] = None, interacting=True, cost=1,
      mean_diffusion : Optional[Callable] = None):

    self.drift_kernel = drift_kernel
    self.diffusion_kernel = diffusion_kernel
    self.bounds = bounds
    self.name = name
    self.mean_field = mean_field
    self.mean_diffusion = mean_diffusion
    self.interacting = interacting
    self.cost = cost

  def drift(self, t, x, y):
    x, y = as_points(x), as_points(y)
    shape = np.broadcast_shapes(x.shape, y.shape)
    return np.broadcast_to(self.drift_kernel(t, x, y), shape)

  def diffusion(self, t, x, y):
    x, y = as_points(x), as_points(y)
    shape = np.broadcast_shapes(x.shape, y.shape)
    return np.broadcast_to(self.diffusion_kernel(t, x, y), (*shape, shape[-1]))

  def scaled(self, drift_scale=1.0, name=None):
    """ Kernel with the drift multiplied by drift_scale """
    drift_kernel = self.drift_kernel
    return InteractionKernel(lambda t, x, y: drift_scale * drift_kernel(t, x, y),
      self.diffusion_kernel, self.bounds, name or self.name,
      mean_field=None, interacting=self.interacting, cost=self.cost,
      mean_diffusion=self.mean_diffusion)

  def __repr__(self):
    return f"InteractionKernel({self.name})"


class MeasureCoefficient(object):
  """ b_t(x, μ), σ_t(x, μ) for atomic measures μ.
  `kernel` is set when the coefficient is a kernel average.
  """

  def __init__(self, drift : Callable, diffusion : Callable, bounds : CoefficientBounds = CoefficientBounds(),
      name="measure_coefficient", kernel : Optional[InteractionKernel] = None):
    self.drift = drift
    self.diffusion = diffusion
    self.bounds = bounds
    self.name = name
    self.kernel = kernel

  def __repr__(self):
    return f"MeasureCoefficient({self.name})"


def check_measure(mu):
  if mu is None or len(mu.atoms) == 0:
    raise InvalidArgument("kernel average over an empty measure")


def kernel_average(f, t, x, mu, cost=1):
  """ Σ_i w_i f(t, x_j, y_i) for every row x_j of x (..., d), summing atoms in
  ascending order. Rows are processed in chunks to bound memory.
  """
  check_measure(mu)
  x = as_points(x)
  prefix, d = x.shape[:-1], x.shape[-1]
  rows = x.reshape(-1, d)
  atoms = mu.atoms
  weights = None if mu.uniform else mu.weights

  rows_per_chunk = max(1, max_pairs // max(1, len(atoms) * cost))
  chunks = []
  for start, stop in chunk_ranges(len(rows), -(-len(rows) // rows_per_chunk)):
    pairs = f(t, rows[start:stop, None, :], atoms[None, :, :])
    chunks.append(ordered_mean(pairs, weights))

  averaged = np.concatenate(chunks, axis=0)
  return averaged.reshape(*prefix, *averaged.shape[1:])


def kernel_to_measure_coefficient(kernel : InteractionKernel):
  def drift(t, x, mu):
    return kernel_average(kernel.drift, t, x, mu, kernel.cost)

  def diffusion(t, x, mu):
    return kernel_average(kernel.diffusion, t, x, mu, kernel.cost)

  return MeasureCoefficient(drift, diffusion, kernel.bounds, name=kernel.name, kernel=kernel)


def as_measure_coefficient(coefficient):
  if isinstance(coefficient, InteractionKernel):
    return kernel_to_measure_coefficient(coefficient)
  elif isinstance(coefficient, MeasureCoefficient):
    return coefficient
  else:
    raise Unsupported(f"expected an InteractionKernel or MeasureCoefficient, got {type(coefficient).__name__}")


def probe_points(key, n, dim, radius):
  return key.generator().uniform(-radius, radius, size=(n, dim))


def growth_audit(coefficient, dim, key, probes=10000, radius=10.0, t=0.0):
  """ Check the declared linear growth constant c0 on random probes in a box.
  coefficient: a (DriftField, DiffusionField) pair or an InteractionKernel.
  """
  if isinstance(coefficient, InteractionKernel):
    x = probe_points(key.child("x"), probes, dim, radius)
    y = probe_points(key.child("y"), probes, dim, radius)
    size = vector_norm(coefficient.drift(t, x, y)) + operator_norm(coefficient.diffusion(t, x, y))
    scale = 1 + vector_norm(x) + vector_norm(y)
    c0 = coefficient.bounds.c0
  else:
    drift, diffusion = coefficient
    x = probe_points(key.child("x"), probes, dim, radius)
    size = vector_norm(drift(t, x)) + operator_norm(diffusion(t, x))
    scale = 1 + vector_norm(x)
    c0 = max(drift.bounds.c0, diffusion.bounds.c0)

  ratio = size / scale
  return struct(max_ratio=float(ratio.max()), c0=c0, passed=bool(np.all(size <= c0 * scale * (1 + 1e-12))))


def nondegeneracy_audit(diffusion, dim, key, probes=10000, radius=10.0, t=0.0):
  """ Spot check det(σσ*) >= c1 on random probes """
  x = probe_points(key.child("x"), probes, dim, radius)
  if isinstance(diffusion, InteractionKernel):
    y = probe_points(key.child("y"), probes, dim, radius)
    dets = gram_det(diffusion.diffusion(t, x, y))
  else:
    dets = gram_det(diffusion(t, x))

  c1 = diffusion.bounds.c1
  return struct(min_det=float(dets.min()), c1=c1, passed=bool(np.all(dets >= c1 * (1 - 1e-12))))
