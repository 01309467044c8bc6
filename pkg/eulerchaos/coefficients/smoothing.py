from functools import lru_cache

import numpy as np

from eulerchaos.errors import InvalidArgument
from .fields import DiffusionField, DriftField, InteractionKernel, as_points


def bump(r):
  """ Unnormalised C-infinity bump exp(-1/(1 - r²)) on r < 1, zero outside """
  r = np.asarray(r, dtype=np.float64)
  inside = r < 1
  out = np.zeros_like(r)
  out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
  return out


@lru_cache(maxsize=32)
def _quadrature(epsilon, node_count, dim):
  spacing = 2.0 * epsilon / node_count
  # symmetric about 0 exactly, odd counts include the centre
  axis = (np.arange(node_count) - (node_count - 1) / 2) * spacing
  nodes = np.stack(np.meshgrid(*[axis] * dim, indexing='ij'), axis=-1).reshape(-1, dim)

  weights = bump(np.linalg.norm(nodes, axis=-1) / epsilon)
  keep = weights > 0
  nodes, weights = nodes[keep], weights[keep]

  nodes.flags.writeable = False
  weights = weights / weights.sum()
  weights.flags.writeable = False
  return nodes, weights


class Mollifier(object):
  """ ρ_ε(x) ∝ exp(-1/(1 - |x/ε|²)) on the ε-ball, discretised by a midpoint
  rule with node_count nodes per axis and normalised to unit mass.
  """

  def __init__(self, epsilon, node_count=9):
    if not (np.isfinite(epsilon) and epsilon > 0):
      raise InvalidArgument(f"Mollifier: epsilon must be positive, got {epsilon}")
    if int(node_count) != node_count or node_count < 1:
      raise InvalidArgument(f"Mollifier: node_count must be a positive integer, got {node_count}")

    self.epsilon = float(epsilon)
    self.node_count = int(node_count)

  def __repr__(self):
    return f"Mollifier(epsilon={self.epsilon}, node_count={self.node_count})"

  def quadrature(self, dim):
    """ Quadrature nodes (q, dim) inside the ε-ball and weights (q,) summing to 1 """
    return _quadrature(self.epsilon, self.node_count, dim)

  def density(self, x):
    """ Continuous density of ρ_ε at points (..., d), normalised by the quadrature """
    x = as_points(x)
    dim = x.shape[-1]
    nodes, _ = self.quadrature(dim)
    cell = (2.0 * self.epsilon / self.node_count) ** dim

    mass = bump(np.linalg.norm(nodes, axis=-1) / self.epsilon).sum() * cell
    return bump(np.linalg.norm(x, axis=-1) / self.epsilon) / mass


def convolve(f, moll, x):
  """ Σ_q w_q f(x - z_q) for an evaluator f of points (..., d) """
  nodes, weights = moll.quadrature(x.shape[-1])
  values = f(x[..., None, :] - nodes)
  w = weights.reshape(-1, *([1] * (values.ndim - x.ndim)))
  return (values * w).sum(axis=x.ndim - 1)


def mollify_field(field, moll : Mollifier):
  """ Convolve a DriftField or DiffusionField in x with ρ_ε """
  assert isinstance(field, (DriftField, DiffusionField)),\
    f"mollify_field: expected a drift or diffusion field, got {type(field).__name__}"

  def mollified(t, x):
    return convolve(lambda z: field(t, z), moll, as_points(x))

  return field.with_evaluator(mollified, name=f"{field.name}*rho({moll.epsilon:g})")


def mollify(kernel : InteractionKernel, moll : Mollifier):
  """ Convolve both kernel components on R^d x R^d with the product ρ_ε(u)ρ_ε(v) """

  def pair_quadrature(dim):
    nodes, weights = moll.quadrature(dim)
    q = len(nodes)
    u = np.repeat(nodes, q, axis=0)
    v = np.tile(nodes, (q, 1))
    return u, v, np.outer(weights, weights).ravel()

  def mollified(f):
    def evaluate(t, x, y):
      x, y = as_points(x), as_points(y)
      shape = np.broadcast_shapes(x.shape, y.shape)
      x, y = np.broadcast_to(x, shape), np.broadcast_to(y, shape)

      u, v, weights = pair_quadrature(shape[-1])
      values = f(t, x[..., None, :] - u, y[..., None, :] - v)
      w = weights.reshape(-1, *([1] * (values.ndim - len(shape))))
      return (values * w).sum(axis=len(shape) - 1)
    return evaluate

  q = len(moll.quadrature(1)[0])
  return InteractionKernel(mollified(kernel.drift), mollified(kernel.diffusion),
    kernel.bounds, name=f"{kernel.name}*rho({moll.epsilon:g})",
    interacting=kernel.interacting, cost=kernel.cost * q * q)


def smoothstep(s):
  """ Quintic smoothstep on [0, 1], clamped outside """
  s = np.clip(s, 0.0, 1.0)
  return s * s * s * (s * (s * 6 - 15) + 10)


def chi(x, R):
  """ Cutoff χ_R(x): 1 for |x| <= R, 0 for |x| >= R + 1, quintic in between """
  r = np.linalg.norm(as_points(x), axis=-1)
  return 1.0 - smoothstep(r - R)


def cutoff(field, R):
  """ χ_R(x) · f(t, x, ...) for a field or a plain evaluator f(t, x, ...) """
  if not (np.isfinite(R) and R > 0):
    raise InvalidArgument(f"cutoff: radius must be positive, got {R}")

  evaluator = field.evaluator if isinstance(field, (DriftField, DiffusionField)) else field

  def cut(t, x, *args):
    x = as_points(x)
    value = np.asarray(evaluator(t, x, *args))
    weight = chi(x, R)
    return value * weight.reshape(weight.shape + (1,) * (value.ndim - weight.ndim))

  if isinstance(field, (DriftField, DiffusionField)):
    return field.with_evaluator(cut, name=f"chi_{R:g}*{field.name}")
  return cut
