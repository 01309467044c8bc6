""" Error functionals over ensembles of simulated paths.

Every expectation is a Monte Carlo average over replications with a
jackknife standard error. Paths of any kind (Euler, discretized Ito,
particle or i.i.d. ensembles, raw arrays) are viewed as an array of shape
(R, J, n+1, d): R replications of J tracked paths over n+1 nodes.
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .coefficients.fields import InteractionKernel, as_measure_coefficient, vector_norm
from .engine.euler import EulerPath
from .engine.ito import DiscretizedItoPath
from .errors import InvalidArgument, Unsupported
from .meanfield.measure import EmpiricalMeasure, wasserstein
from .meanfield.particles import IidEnsemble, ParticleEnsemble
from .timegrid import TimeGrid


@dataclass(frozen=True)
class ErrorEstimate:
  value: float
  stderr: float
  replications: int
  metadata: dict = field(default_factory=dict)

  def __post_init__(self):
    assert self.stderr >= 0, f"ErrorEstimate: negative stderr {self.stderr}"
    assert self.value >= 0, f"ErrorEstimate: negative value {self.value}"

  def __repr__(self):
    return f"ErrorEstimate({self.value:.6g} ± {self.stderr:.3g}, R={self.replications})"


@dataclass(frozen=True)
class RateFit:
  slope: float
  intercept: float
  r_squared: float
  points: List[Tuple[float, float]]
  slope_stderr: float = 0.0


def jackknife(samples, transform=None):
  """ (estimate, stderr) of transform(mean(samples)) by leave-one-out means.
  samples: (R, ...) with the replication axis first.
  """
  samples = np.asarray(samples, dtype=np.float64)
  transform = transform or (lambda m: m)
  R = samples.shape[0]
  if R == 0:
    raise InvalidArgument("jackknife: no samples")

  mean = samples.mean(axis=0)
  estimate = transform(mean)
  if R == 1:
    return estimate, np.zeros_like(estimate)

  loo = transform((samples.sum(axis=0) - samples) / (R - 1))
  spread = ((loo - loo.mean(axis=0)) ** 2).sum(axis=0)
  return estimate, np.sqrt((R - 1) / R * spread)


def estimate(samples, transform=None, **metadata):
  value, stderr = jackknife(samples, transform)
  return ErrorEstimate(float(value), float(stderr), len(samples), metadata)


def path_grid(paths):
  if isinstance(paths, DiscretizedItoPath):
    return TimeGrid(1.0, paths.N)
  return getattr(paths, 'grid', None)


def path_array(paths):
  """ View of any path container as (R, J, n+1, d) """
  if isinstance(paths, ParticleEnsemble):
    x = paths.trajectories
    return x[None] if x.ndim == 3 else x.reshape(-1, *x.shape[-3:])

  if isinstance(paths, EulerPath):
    x = paths.states
  elif isinstance(paths, DiscretizedItoPath):
    x = paths.values
  else:
    x = np.asarray(paths, dtype=np.float64)

  if x.ndim == 2:
    x = x[None]
  return x.reshape(-1, *x.shape[-2:])[:, None]


def check_coupled(a, b):
  keys_a, keys_b = getattr(a, 'keys', None), getattr(b, 'keys', None)
  if keys_a is not None and keys_b is not None and tuple(keys_a) != tuple(keys_b):
    raise InvalidArgument("strong_error: ensembles are driven by different keys, they are not coupled")


def common_nodes(a, b):
  """ Arrays of a and b on the nodes they share, the finer one subsampled """
  x, y = path_array(a), path_array(b)
  grid_a, grid_b = path_grid(a), path_grid(b)

  if grid_a is not None and grid_b is not None and grid_a != grid_b:
    if grid_a.divides(grid_b):
      y = y[..., ::grid_b.n // grid_a.n, :]
    elif grid_b.divides(grid_a):
      x = x[..., ::grid_a.n // grid_b.n, :]
    else:
      raise InvalidArgument(f"strong_error: {grid_a} and {grid_b} share no node set")

  if x.shape != y.shape:
    raise InvalidArgument(f"strong_error: shapes differ, {x.shape} vs {y.shape}")
  return x, y


def sup_square_samples(a, b):
  """ sup over nodes of |A - B|², per replication and tracked path: (R, J) """
  check_coupled(a, b)
  x, y = common_nodes(a, b)
  return np.max(np.sum((x - y) ** 2, axis=-1), axis=-1)


def worst_path(samples, transform=None, **metadata):
  """ Estimate for the tracked index j with the largest mean """
  value, stderr = jackknife(samples, transform)
  j = int(np.argmax(value))
  return ErrorEstimate(float(value[j]), float(stderr[j]), samples.shape[0],
    dict(metadata, worst_index=j))


def strong_error(a, b, **metadata):
  """ E sup_nodes |A - B|², the sup taken per replication, max over tracked paths """
  return worst_path(sup_square_samples(a, b), **metadata)


def strong_rms_error(a, b, **metadata):
  """ Square root of strong_error, the form used for rate fitting """
  return worst_path(sup_square_samples(a, b), np.sqrt, **metadata)


class BoundedFunction(object):
  """ Test function f(x) for points (..., d) with a declared sup bound """

  def __init__(self, evaluator, bound, name="f"):
    self.evaluator = evaluator
    self.bound = bound
    self.name = name

  def __call__(self, x):
    return np.asarray(self.evaluator(np.asarray(x)), dtype=np.float64)

  def __repr__(self):
    return f"BoundedFunction({self.name}, |f| <= {self.bound})"


def constant_function(c):
  return BoundedFunction(lambda x: np.full(x.shape[:-1], float(c)), abs(c), name=f"const({c:g})")


def halfspace_indicator():
  """ 1_{[0, ∞)} of the first coordinate """
  return BoundedFunction(lambda x: (x[..., 0] >= 0).astype(np.float64), 1.0, name="halfspace")


def ball_indicator(r):
  return BoundedFunction(lambda x: (vector_norm(x) <= r).astype(np.float64), 1.0, name=f"ball({r:g})")


test_functions = dict(
  halfspace=halfspace_indicator,
  ball=lambda: ball_indicator(1.0),
  one=lambda: constant_function(1.0)
)


def load_test_function(name):
  if name not in test_functions:
    raise InvalidArgument(f"unknown test function '{name}', options are ({' | '.join(test_functions)})")
  return test_functions[name]()


def occupation_integrals(paths, f : BoundedFunction):
  """ h·Σ_k f(X_{t_k}) over k = 0..n-1, the integral of f along the floored path: (R,) """
  grid = path_grid(paths)
  x = path_array(paths)
  h = grid.h if grid is not None else 1.0 / (x.shape[-2] - 1)
  return h * f(x[..., :-1, :]).sum(axis=-1).mean(axis=-1)


def difference_estimate(a, b, **metadata):
  """ |E a - E b| from independent sample sets, stderrs combined in quadrature """
  a, b = estimate(a), estimate(b)
  return ErrorEstimate(abs(a.value - b.value), float(np.hypot(a.stderr, b.stderr)),
    min(a.replications, b.replications), metadata)


def weak_occupation_error(paths, f : BoundedFunction, reference, **metadata):
  """ |E ∫ f(X^h_{t_h}) dt - E ∫ f(reference) dt| with the combined stderr """
  if f.bound is None or not np.isfinite(f.bound):
    raise Unsupported(f"weak_occupation_error: {f.name} has no declared bound")

  if paths is reference:
    return ErrorEstimate(0.0, 0.0, path_array(paths).shape[0], metadata)

  return difference_estimate(occupation_integrals(paths, f), occupation_integrals(reference, f), **metadata)


def sup_moment(paths, beta, **metadata):
  """ E sup_nodes |X|^β, max over tracked paths for ensembles """
  if not beta >= 2:
    raise InvalidArgument(f"sup_moment: beta must be >= 2, got {beta}")

  x = path_array(paths)
  samples = np.max(vector_norm(x) ** beta, axis=-1)
  return worst_path(samples, **metadata)


def holder_ratio(paths, beta):
  """ max over node pairs s < t of E|X_s - X_t|^β / |s - t|^{β/2} """
  if not beta >= 2:
    raise InvalidArgument(f"holder_ratio: beta must be >= 2, got {beta}")

  x = path_array(paths)
  n = x.shape[-2] - 1
  if n < 1:
    raise InvalidArgument("holder_ratio: need at least 2 nodes")

  grid = path_grid(paths)
  nodes = grid.nodes if grid is not None else np.arange(n + 1) / n

  ratio = 0.0
  for lag in range(1, n + 1):
    moments = np.mean(vector_norm(x[..., lag:, :] - x[..., :-lag, :]) ** beta, axis=0)
    gaps = (nodes[lag:] - nodes[:-lag]) ** (beta / 2)
    ratio = max(ratio, float(np.max(moments / gaps)))
  return ratio


def kernel_average_deviation(iid : IidEnsemble, kernel : InteractionKernel, t, mean_field=None, N=None):
  """ E|(1/N)Σ_i (b_t(X̄¹_t, μ_t) - b̄_t(X̄¹_t, X̄ⁱ_t))|² over the first N tracked copies,
  with μ_t the pool's empirical measure and b_t given in closed form.
  """
  mean_field = mean_field or kernel.mean_field
  if mean_field is None:
    raise Unsupported(f"kernel_average_deviation: kernel {kernel.name} has no closed-form mean field")

  k = iid.grid.node_index(t)
  if k is None:
    raise InvalidArgument(f"kernel_average_deviation: t={t} is not a node of {iid.grid}")

  N = iid.N if N is None else N
  if not 1 <= N <= iid.N:
    raise InvalidArgument(f"kernel_average_deviation: N={N} outside 1..{iid.N}")

  x = path_array(iid)[:, :N, k, :]
  first = x[:, :1, :]
  mu = iid.pool_measure(k).canonical()

  exact = np.broadcast_to(mean_field(t, first[:, 0], mu)[:, None], first.shape)
  deviation = np.mean(exact - kernel.drift(t, first, x), axis=1)
  return estimate(np.sum(deviation ** 2, axis=-1), N=N, t=t)


def fit_rate(points):
  """ Least squares line through (log x, log y) """
  points = [(float(x), float(y)) for x, y in points]
  if len(points) < 3:
    raise InvalidArgument(f"fit_rate: need at least 3 points, got {len(points)}")
  if any(not (x > 0 and y > 0) for x, y in points):
    raise InvalidArgument(f"fit_rate: values must be positive, got {points}")

  logs = np.log(np.array(points))
  u, v = logs[:, 0], logs[:, 1]
  A = np.stack([u, np.ones_like(u)], axis=1)
  (slope, intercept), *_ = np.linalg.lstsq(A, v, rcond=None)

  residual = v - A @ np.array([slope, intercept])
  total = np.sum((v - v.mean()) ** 2)
  r_squared = 1.0 if total == 0 else float(np.clip(1 - np.sum(residual ** 2) / total, 0, 1))

  spread = np.sum((u - u.mean()) ** 2)
  slope_stderr = 0.0 if spread == 0 else float(np.sqrt(np.sum(residual ** 2) / (len(u) - 2) / spread))

  return RateFit(float(slope), float(intercept), r_squared, [tuple(p) for p in logs.tolist()], slope_stderr)


def ensemble_measure(paths, k):
  """ Empirical measure the paths interacted with at node k, per replication """
  if isinstance(paths, IidEnsemble):
    pool = EmpiricalMeasure(paths.law_pool[..., k, :]).canonical()
    return lambda r: pool
  x = path_array(paths)
  return lambda r: EmpiricalMeasure(x[r, :, k, :]).canonical()


def mollification_gap(paths, kernel : InteractionKernel, mollified : InteractionKernel):
  """ max_j E ∫ |b_s - b^ε_s|²(X^j_{s_h}, μ_{s_h}) ds with b, b^ε the kernel
  averages of the drift and its mollification over the ensemble's own measure.
  """
  grid = path_grid(paths)
  x = path_array(paths)
  exact, smooth = as_measure_coefficient(kernel), as_measure_coefficient(mollified)

  R, J = x.shape[:2]
  samples = np.zeros((R, J))
  for k in range(grid.n):
    t = grid.node(k)
    measure = ensemble_measure(paths, k)
    for r in range(R):
      mu = measure(r)
      gap = exact.drift(t, x[r, :, k], mu) - smooth.drift(t, x[r, :, k], mu)
      samples[r] += grid.h * np.sum(gap ** 2, axis=-1)

  return worst_path(samples)


def terminal_measure(paths):
  x = path_array(paths)
  return EmpiricalMeasure(x[..., -1, :].reshape(-1, x.shape[-1]))


def terminal_wasserstein(a, b, order=1):
  """ W_order between the terminal marginals of two ensembles """
  return wasserstein(terminal_measure(a), terminal_measure(b), order)
