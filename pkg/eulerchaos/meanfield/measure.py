import numpy as np
from cached_property import cached_property

from eulerchaos.brownian import StreamKey
from eulerchaos.errors import InvalidArgument, Unsupported
from eulerchaos.reduce import ordered_mean

projection_count = 64


class EmpiricalMeasure(object):
  """ Atomic measure Σ_i w_i δ_{y_i}, atoms (N, d) and weights (N,) """

  def __init__(self, atoms, weights=None):
    atoms = np.asarray(atoms, dtype=np.float64)
    if atoms.ndim == 1:
      atoms = atoms[:, None]

    if atoms.ndim != 2 or atoms.shape[0] == 0:
      raise InvalidArgument(f"EmpiricalMeasure: expected N >= 1 atoms of shape (N, d), got {atoms.shape}")

    self.atoms = atoms
    self.uniform = weights is None

    if weights is None:
      weights = np.full(len(atoms), 1.0 / len(atoms))
    else:
      weights = np.asarray(weights, dtype=np.float64)
      if weights.shape != (len(atoms),) or np.any(weights < 0):
        raise InvalidArgument(f"EmpiricalMeasure: expected {len(atoms)} nonnegative weights")
      if abs(weights.sum() - 1.0) > 1e-12:
        raise InvalidArgument(f"EmpiricalMeasure: weights sum to {weights.sum()}, expected 1")

    self.weights = weights

  def __len__(self):
    return len(self.atoms)

  @property
  def dim(self):
    return self.atoms.shape[1]

  def __repr__(self):
    return f"EmpiricalMeasure(N={len(self)}, d={self.dim})"

  @cached_property
  def mean(self):
    weights = None if self.uniform else self.weights
    return ordered_mean(self.atoms[None], weights)[0]

  def canonical(self):
    """ Same measure with atoms in lexicographic order, so averages do not depend on labelling """
    order = np.lexsort(self.atoms.T[::-1])
    weights = None if self.uniform else self.weights[order]
    return EmpiricalMeasure(self.atoms[order], weights)


def empirical(positions):
  positions = np.asarray(positions, dtype=np.float64)
  if positions.size == 0:
    raise InvalidArgument("empirical: no positions")
  return EmpiricalMeasure(positions)


def measure_moment(mu : EmpiricalMeasure, beta):
  """ μ(|·|^β)^(1/β) """
  if not beta >= 1:
    raise InvalidArgument(f"measure_moment: beta must be >= 1, got {beta}")

  norms = np.linalg.norm(mu.atoms, axis=-1)
  return float(np.sum(mu.weights * norms ** beta) ** (1.0 / beta))


def quantile_coupling(x, a, y, b, order):
  """ W_p^p between two weighted 1-d measures via their quantile functions """
  ix, iy = np.argsort(x, kind='stable'), np.argsort(y, kind='stable')
  x, a, y, b = x[ix], a[ix], y[iy], b[iy]

  A, B = np.cumsum(a), np.cumsum(b)
  A[-1] = B[-1] = 1.0
  u = np.union1d(A, B)
  du = np.diff(np.concatenate([[0.0], u]))
  mid = u - du / 2

  qx = x[np.minimum(np.searchsorted(A, mid), len(x) - 1)]
  qy = y[np.minimum(np.searchsorted(B, mid), len(y) - 1)]
  return float(np.sum(du * np.abs(qx - qy) ** order))


def wasserstein_1d(x, a, y, b, order, uniform):
  if uniform and len(x) == len(y):
    return float(np.mean(np.abs(np.sort(x) - np.sort(y)) ** order))
  return quantile_coupling(x, a, y, b, order)


def projections(dim, count=projection_count, key=None):
  key = key or StreamKey(0, [("wasserstein", dim)])
  directions = key.generator().standard_normal((count, dim))
  return directions / np.linalg.norm(directions, axis=-1, keepdims=True)


def wasserstein(mu : EmpiricalMeasure, nu : EmpiricalMeasure, order=1, key=None):
  """ W_order distance, exact by sorted coupling in d = 1, sliced estimate with
  fixed random projections in d > 1.
  """
  if order not in (1, 2):
    raise InvalidArgument(f"wasserstein: order must be 1 or 2, got {order}")
  if mu.dim != nu.dim:
    raise InvalidArgument(f"wasserstein: dimension mismatch {mu.dim} vs {nu.dim}")

  uniform = mu.uniform and nu.uniform
  if len(mu) != len(nu) and not uniform:
    raise Unsupported("wasserstein: unequal atom counts with non-uniform weights")

  if mu.dim == 1:
    cost = wasserstein_1d(mu.atoms[:, 0], mu.weights, nu.atoms[:, 0], nu.weights, order, uniform)
  else:
    directions = projections(mu.dim, key=key)
    cost = np.mean([wasserstein_1d(mu.atoms @ v, mu.weights, nu.atoms @ v, nu.weights, order, uniform)
      for v in directions])

  return float(cost ** (1.0 / order))
