from dataclasses import dataclass
from typing import Callable

import numpy as np
from structs.struct import struct

from eulerchaos.brownian import BrownianPath
from eulerchaos.coefficients.catalog import load_entry
from eulerchaos.coefficients.fields import CoefficientBounds, gram_det, identity_like,\
  operator_norm, vector_norm
from eulerchaos.errors import BoundViolation, InvalidArgument
from .euler import check_finite, diffuse, initial_states


class AdaptedCoefficientRule(object):
  """ (b_j, σ_j) = evaluator(j, t, history, aux) with t = j/N

  history holds ξ_0..ξ_j with shape (..., j+1, d) and aux the auxiliary draws
  of steps 0..j, shape (..., j+1, aux_dim), or None when aux_dim is 0. Both are
  truncated views, the evaluator never sees anything sampled after step j.
  """

  def __init__(self, evaluator : Callable, bounds : CoefficientBounds, name="rule", aux_dim=0):
    self.evaluator = evaluator
    self.bounds = bounds
    self.name = name
    self.aux_dim = aux_dim

  def __call__(self, j, t, history, aux=None):
    b, sigma = self.evaluator(j, t, history, aux)
    x = history[..., -1, :]
    d = x.shape[-1]
    return np.broadcast_to(b, x.shape), np.broadcast_to(sigma, (*x.shape[:-1], d, d))

  def __repr__(self):
    return f"AdaptedCoefficientRule({self.name})"


class DiscretizedItoPath(object):
  """ ξ^N_k for k = 0..N, shape (..., N+1, d), with the recorded coefficient
  trace (b_j (..., N, d), σ_j (..., N, d, d)) when it was kept.
  """

  def __init__(self, values, drift_trace=None, diffusion_trace=None, rule=None):
    self.values = np.asarray(values)
    self.drift_trace = drift_trace
    self.diffusion_trace = diffusion_trace
    self.rule = rule

  @property
  def N(self):
    return self.values.shape[-2] - 1

  @property
  def dim(self):
    return self.values.shape[-1]

  @property
  def batch_shape(self):
    return self.values.shape[:-2]

  def __repr__(self):
    return f"DiscretizedItoPath(N={self.N}, batch={self.batch_shape}, d={self.dim})"


def audit_step(j, b, sigma, bounds, tol=1e-12):
  """ |b_j| <= κ0, ‖σ_j‖ <= κ0 and det(σ_jσ_j*) >= κ1 """
  kappa0, kappa1 = bounds.kappa0, bounds.kappa1

  size = vector_norm(b).max()
  if size > kappa0 * (1 + tol):
    raise BoundViolation(j, "|b_j|", size, kappa0)

  norm = operator_norm(sigma).max()
  if norm > kappa0 * (1 + tol):
    raise BoundViolation(j, "|sigma_j|", norm, kappa0)

  try:
    det = gram_det(sigma).min()
  except np.linalg.LinAlgError:
    det = 0.0

  if det < kappa1 * (1 - tol):
    raise BoundViolation(j, "det(sigma_j sigma_j*)", det, kappa1)


def audit_trace(path : DiscretizedItoPath, bounds : CoefficientBounds):
  """ Replay the recorded coefficients against the declared bounds """
  assert path.drift_trace is not None, "audit_trace: path was simulated without a trace"

  for j in range(path.N):
    audit_step(j, path.drift_trace[..., j, :], path.diffusion_trace[..., j, :, :], bounds)

  return struct(
    max_drift=float(vector_norm(path.drift_trace).max()),
    max_diffusion=float(operator_norm(path.diffusion_trace).max()),
    min_det=float(gram_det(path.diffusion_trace).min())
  )


def sample_aux(keys, N, aux_dim):
  """ Auxiliary uniforms per replication key, from a stream disjoint from the Brownian one """
  if aux_dim == 0:
    return None
  return np.stack([key.child("aux").generator().uniform(size=(N, aux_dim)) for key in keys])


def simulate_discretized_ito(rule : AdaptedCoefficientRule, xi0, N : int, bm : BrownianPath,
    aux=None, record_trace=True):
  """ ξ_k = ξ_{k-1} + b_{k-1}/N + σ_{k-1}·ΔW_{k-1} with every (b_j, σ_j) audited """

  if int(N) != N or N < 1:
    raise InvalidArgument(f"simulate_discretized_ito: N must be a positive integer, got {N}")
  if bm.grid.n != N or abs(bm.grid.T - 1.0) > 1e-12:
    raise InvalidArgument(f"simulate_discretized_ito: expected a Brownian path with {N} steps on [0, 1], got {bm.grid}")

  if rule.aux_dim > 0:
    if aux is None:
      raise InvalidArgument(f"rule {rule.name} needs {rule.aux_dim} auxiliary draws per step")
    aux = np.asarray(aux)
    assert aux.shape == (*bm.batch_shape, N, rule.aux_dim),\
      f"simulate_discretized_ito: expected aux {(*bm.batch_shape, N, rule.aux_dim)}, got {aux.shape}"

  d = bm.dim
  values = np.empty((*bm.batch_shape, N + 1, d))
  values[..., 0, :] = initial_states(xi0, bm.batch_shape, d)

  drift_trace = np.empty((*bm.batch_shape, N, d)) if record_trace else None
  diffusion_trace = np.empty((*bm.batch_shape, N, d, d)) if record_trace else None

  for j in range(N):
    history = values[..., :j + 1, :]
    b, sigma = rule(j, j / N, history, None if aux is None else aux[..., :j + 1, :])
    check_finite(j, j / N, history[..., -1, :], b, sigma)
    audit_step(j, b, sigma, rule.bounds)

    values[..., j + 1, :] = values[..., j, :] + b / N + diffuse(sigma, bm.increments[..., j, :])

    if record_trace:
      drift_trace[..., j, :] = b
      diffusion_trace[..., j, :, :] = sigma

  return DiscretizedItoPath(values, drift_trace, diffusion_trace, rule)


def first_axis(history):
  x = history[..., -1, :]
  e1 = np.zeros(x.shape[-1])
  e1[0] = 1.0
  return x, e1


@dataclass
class EmptyParams:
  pass

def brownian_rule(dim):
  """ (0, I): ξ is the Brownian motion itself """
  def evaluate(j, t, history, aux):
    x = history[..., -1, :]
    return np.zeros(x.shape), identity_like(x)

  return AdaptedCoefficientRule(evaluate, CoefficientBounds(kappa0=1.0, kappa1=1.0), name="brownian")


@dataclass
class ConstantDriftParams:
  b0: float = 0.5

def constant_drift_rule(dim, b0=0.5):
  def evaluate(j, t, history, aux):
    x = history[..., -1, :]
    return np.full(x.shape, float(b0)), identity_like(x)

  bounds = CoefficientBounds(kappa0=max(1.0, abs(b0) * np.sqrt(dim)), kappa1=1.0)
  return AdaptedCoefficientRule(evaluate, bounds, name="constant_drift")


def sin_switch_rule(dim):
  """ b_j = clamp(sin(ξ_j·e₁), ±1) e₁, σ_j = (1 + ½·1_{ξ_j·e₁ > 0}) I """
  def evaluate(j, t, history, aux):
    x, e1 = first_axis(history)
    b = np.clip(np.sin(x[..., 0]), -1, 1)[..., None] * e1
    sigma = identity_like(x) * (1.0 + 0.5 * (x[..., 0] > 0))[..., None, None]
    return b, sigma

  return AdaptedCoefficientRule(evaluate, CoefficientBounds(kappa0=1.5, kappa1=1.0), name="sin_switch")


@dataclass
class AuxSwitchParams:
  p: float = 0.5

def aux_switch_rule(dim, p=0.5):
  """ σ_j = (1 + ½·1_{U_j < p}) I for an auxiliary uniform U_j drawn at step j """
  def evaluate(j, t, history, aux):
    x = history[..., -1, :]
    u = aux[..., -1, 0]
    return np.zeros(x.shape), identity_like(x) * (1.0 + 0.5 * (u < p))[..., None, None]

  return AdaptedCoefficientRule(evaluate, CoefficientBounds(kappa0=1.5, kappa1=1.0),
    name="aux_switch", aux_dim=1)


@dataclass
class EulerRuleParams:
  kappa0: float = 2.0
  kappa1: float = 1.0

def euler_rule(dim, kappa0=2.0, kappa1=1.0, model=None):
  """ b_j = b(j/N, ξ_j), σ_j = σ(j/N, ξ_j): ξ^N_k is the Euler scheme X^{1/N}_{k/N} """
  if model is None:
    raise InvalidArgument("rule 'euler' needs a model")

  def evaluate(j, t, history, aux):
    x = history[..., -1, :]
    return model.drift(t, x), model.diffusion(t, x)

  return AdaptedCoefficientRule(evaluate, CoefficientBounds(kappa0=kappa0, kappa1=kappa1),
    name=f"euler({model.name})")


rules = dict(
  brownian=(EmptyParams, brownian_rule),
  constant_drift=(ConstantDriftParams, constant_drift_rule),
  sin_switch=(EmptyParams, sin_switch_rule),
  aux_switch=(AuxSwitchParams, aux_switch_rule),
  euler=(EulerRuleParams, euler_rule)
)


def load_rule(name, params=None, dim=1, model=None):
  if name == "euler":
    return load_entry(rules, "rule", name, params, dim=dim, model=model)
  return load_entry(rules, "rule", name, params, dim=dim)
