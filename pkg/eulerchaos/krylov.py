""" Occupation averages of discretized Ito processes against discrete L^p norms. """
from typing import Callable, List, Optional

import numpy as np
from structs.struct import struct

from .coefficients.density import ball_volume
from .coefficients.fields import vector_norm
from .diagnostics import ErrorEstimate, estimate, path_array
from .errors import DegenerateFamily, InvalidArgument, Unsupported
from .io.logging import warning


class GridFunction(object):
  """ Nonnegative f(x) for points (..., d) and an optional provider of ‖f‖_{L^p}.
  tag and params identify closed-form members.
  """

  def __init__(self, evaluator : Callable, norm : Optional[Callable] = None, tag="f", params=None):
    self.evaluator = evaluator
    self.norm = norm
    self.tag = tag
    self.params = params or {}

  def __call__(self, x):
    return np.asarray(self.evaluator(np.asarray(x)), dtype=np.float64)

  def lp_norm(self, p):
    if self.norm is None:
      raise Unsupported(f"{self.tag}: no L^p norm provider")
    value = float(self.norm(p))
    assert value >= 0 and np.isfinite(value), f"{self.tag}: invalid L^{p} norm {value}"
    return value

  def identity(self):
    return (self.tag, tuple(sorted(self.params.items())))

  def scaled(self, c):
    assert c > 0, f"scaled: factor must be positive, got {c}"
    norm = None if self.norm is None else (lambda p: c * self.norm(p))
    return GridFunction(lambda x: c * self.evaluator(x), norm, self.tag, dict(self.params, scale=c))

  def __repr__(self):
    return f"GridFunction({self.tag}, {self.params})"


class GridFunctionFamily(object):
  """ Test functions f_1..f_N, member k applied to ξ^N_k """

  def __init__(self, members : List[GridFunction]):
    if len(members) == 0:
      raise InvalidArgument("GridFunctionFamily: no members")
    self.members = list(members)

  @property
  def N(self):
    return len(self.members)

  @property
  def identical(self):
    first = self.members[0].identity()
    return all(f.identity() == first for f in self.members)

  def evaluate(self, values):
    """ f_k(ξ_k) for k = 1..N given values (..., N+1, d): (..., N) """
    if self.identical:
      return self.members[0](values[..., 1:, :])
    return np.stack([f(values[..., k + 1, :]) for k, f in enumerate(self.members)], axis=-1)

  def scaled(self, c):
    return GridFunctionFamily([f.scaled(c) for f in self.members])

  def __repr__(self):
    return f"GridFunctionFamily(N={self.N}, {self.members[0]}{'' if self.identical else ', ...'})"


def ball_indicator_function(r, d):
  if not r > 0:
    raise InvalidArgument(f"ball_indicator: radius must be positive, got {r}")

  volume = ball_volume(r, d)
  return GridFunction(lambda x: (vector_norm(x) <= r).astype(np.float64),
    norm=lambda p: volume ** (1.0 / p), tag="ball", params=dict(r=r, d=d))


def ball_indicator_family(r, d, N):
  """ f_k = 1_{B_r} for every k, ‖f_k‖_{L^p} = vol(B_r)^{1/p} """
  f = ball_indicator_function(r, d)
  return GridFunctionFamily([f] * int(N))


def zero_family(N):
  zero = GridFunction(lambda x: np.zeros(x.shape[:-1]), norm=lambda p: 0.0, tag="zero")
  return GridFunctionFamily([zero] * int(N))


def quadrature_norm(f : Callable, box, resolution, p):
  """ ‖f‖_{L^p} by the midpoint rule on the box [lo, hi]^d with resolution cells per axis """
  lo, hi, d = box
  width = (hi - lo) / resolution
  axis = lo + (np.arange(resolution) + 0.5) * width
  points = np.stack(np.meshgrid(*[axis] * d, indexing='ij'), axis=-1).reshape(-1, d)
  return float((np.sum(np.abs(f(points)) ** p) * width ** d) ** (1.0 / p))


def quadrature_function(evaluator, box, resolution=256, tag="quadrature"):
  """ A member whose norm is computed by quadrature on a declared box outside which it vanishes """
  return GridFunction(evaluator, norm=lambda p: quadrature_norm(evaluator, box, resolution, p),
    tag=tag, params=dict(box=tuple(box), resolution=resolution))


def check_steps(paths, family):
  x = path_array(paths)
  N = x.shape[-2] - 1
  if N != family.N:
    raise InvalidArgument(f"family has {family.N} members, paths have {N} steps")
  return x


def occupation_samples(paths, family : GridFunctionFamily):
  """ (1/N)Σ_{k=1..N} f_k(ξ^N_k) per replication: (R,) """
  x = check_steps(paths, family)
  return family.evaluate(x).mean(axis=-1).mean(axis=-1)


def occupation_average(paths, family : GridFunctionFamily):
  return estimate(occupation_samples(paths, family), N=family.N)


def lp_seq_norm(family : GridFunctionFamily, p):
  """ ((1/N)Σ_k ‖f_k‖^p_{L^p})^{1/p} """
  if not p > 1:
    raise InvalidArgument(f"lp_seq_norm: p must exceed 1, got {p}")

  if family.identical:
    return family.members[0].lp_norm(p)

  norms = np.array([f.lp_norm(p) for f in family.members])
  return float(np.mean(norms ** p) ** (1.0 / p))


def ratio_from(occupation : ErrorEstimate, family : GridFunctionFamily, p, dim, time_independent=False):
  """ Ratio of a precomputed occupation estimate to the family's normalizer """
  if time_independent:
    if not family.identical:
      raise InvalidArgument("krylov_ratio: time-independent ratio needs identical members")
    if not p > dim:
      raise InvalidArgument(f"krylov_ratio: time-independent ratio needs p > d={dim}, got {p}")
    denominator = family.members[0].lp_norm(p)
  else:
    if not p > dim + 1:
      warning(f"krylov_ratio: p={p} <= d+1, the bound is not claimed here")
    denominator = lp_seq_norm(family, p)

  if denominator == 0:
    raise DegenerateFamily(f"krylov_ratio: L^{p} normalizer is zero")

  value = occupation.value / denominator
  stderr = occupation.stderr / denominator
  return struct(value=value, stderr=stderr, interval=(value - 3 * stderr, value + 3 * stderr),
    occupation=occupation, norm=denominator, p=p, time_independent=time_independent)


def krylov_ratio(paths, family : GridFunctionFamily, p, time_independent=False):
  """ occupation_average / lp_seq_norm, or / ‖f‖_{L^p} for a time-independent family """
  dim = path_array(paths).shape[-1]
  return ratio_from(occupation_average(paths, family), family, p, dim, time_independent)
