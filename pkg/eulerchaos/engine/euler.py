import numpy as np

from eulerchaos.brownian import BrownianPath, index_keys
from eulerchaos.coefficients.fields import DiffusionField, DriftField, as_points
from eulerchaos.errors import InvalidArgument, NumericFailure
from eulerchaos.timegrid import TimeGrid


class EulerPath(object):
  """ Node states X^h_{kh}, k = 0..n, shape (..., n+1, d), leading axes are
  replications. Carries the coefficients used so the continuous
  interpolation can be evaluated between nodes.
  """

  def __init__(self, grid : TimeGrid, states, drift=None, diffusion=None, keys=None):
    states = np.asarray(states, dtype=np.float64)
    assert states.ndim >= 2 and states.shape[-2] == grid.n + 1,\
      f"EulerPath: expected states (..., {grid.n + 1}, d), got {states.shape}"

    self.grid = grid
    self.states = states
    self.drift = drift
    self.diffusion = diffusion
    self.keys = keys

  @property
  def dim(self):
    return self.states.shape[-1]

  @property
  def batch_shape(self):
    return self.states.shape[:-2]

  def __len__(self):
    assert len(self.batch_shape) > 0, "EulerPath: single path has no length"
    return self.batch_shape[0]

  def __getitem__(self, i):
    return EulerPath(self.grid, self.states[i], self.drift, self.diffusion, index_keys(self.keys, i))

  def __repr__(self):
    return f"EulerPath({self.grid}, batch={self.batch_shape}, d={self.dim})"

  @property
  def initial(self):
    return self.states[..., 0, :]

  @property
  def terminal(self):
    return self.states[..., -1, :]

  def floored(self, fine_grid : TimeGrid):
    """ X^h_{t_h} at every node t of a finer grid """
    if not self.grid.divides(fine_grid):
      raise InvalidArgument(f"floored: {fine_grid} does not refine {self.grid}")

    factor = fine_grid.n // self.grid.n
    inner = np.repeat(self.states[..., :-1, :], factor, axis=-2)
    return np.concatenate([inner, self.states[..., -1:, :]], axis=-2)


def check_finite(step, t, x, *values, particle=None):
  """ Raise NumericFailure at the first point of x whose coefficients are not finite """
  rows = x.reshape(-1, x.shape[-1])
  for value in values:
    finite = np.isfinite(value)
    if not np.all(finite):
      bad = np.flatnonzero(~finite.reshape(len(rows), -1).all(axis=-1))
      i = int(bad[0]) if len(bad) > 0 else 0
      raise NumericFailure(step, t, rows[i], particle=i if particle else None)


def diffuse(sigma, dW):
  """ σ·dW for (..., d, d) matrices and (..., d) increments """
  return np.einsum('...ij,...j->...i', sigma, dW)


def euler_step(b : DriftField, sigma : DiffusionField, t_k, x, h, dW, step=0):
  """ x + b(t_k, x) h + σ(t_k, x) dW """
  if not h > 0:
    raise InvalidArgument(f"euler_step: h must be positive, got {h}")

  x = as_points(x)
  drift = b(t_k, x)
  diffusion = sigma(t_k, x)
  check_finite(step, t_k, x, drift, diffusion)

  return x + drift * h + diffuse(diffusion, np.asarray(dW, dtype=np.float64))


def initial_states(x0, batch_shape, dim):
  x0 = as_points(x0)
  if x0.shape[-1] != dim:
    raise InvalidArgument(f"initial condition has dimension {x0.shape[-1]}, Brownian motion has {dim}")
  return np.broadcast_to(x0, (*batch_shape, dim)).astype(np.float64)


def simulate_euler(b : DriftField, sigma : DiffusionField, x0, grid : TimeGrid, bm : BrownianPath):
  """ Iterate euler_step over the grid, one path per Brownian replication """
  if bm.grid != grid:
    raise InvalidArgument(f"simulate_euler: Brownian path is on {bm.grid}, expected {grid}")

  x = initial_states(x0, bm.batch_shape, bm.dim)
  states = np.empty((*bm.batch_shape, grid.n + 1, bm.dim))
  states[..., 0, :] = x

  for k in range(grid.n):
    x = euler_step(b, sigma, grid.node(k), x, grid.h, bm.increments[..., k, :], step=k)
    states[..., k + 1, :] = x

  return EulerPath(grid, states, b, sigma, bm.keys)


def check_refines(path, bm):
  if not (path.grid.divides(bm.grid) and bm.grid.n > path.grid.n):
    raise InvalidArgument(f"interpolate: Brownian path on {bm.grid} is not strictly finer than {path.grid}")


def interpolate(path : EulerPath, bm : BrownianPath, t):
  """ X^h_t = X^h_{t_h} + b(t_h, X^h_{t_h})(t - t_h) + σ(t_h, X^h_{t_h})(W_t - W_{t_h})
  at a node t of the finer Brownian grid.
  """
  check_refines(path, bm)
  if bm.grid.node_index(t) is None:
    raise InvalidArgument(f"interpolate: t={t} is not a node of {bm.grid}")

  k = path.grid.floor_index(t)
  t_h = path.grid.node(k)
  x = path.states[..., k, :]
  if t == t_h or k == path.grid.n:
    return x

  dW = bm.at(t) - bm.at(t_h)
  return x + path.drift(t_h, x) * (t - t_h) + diffuse(path.diffusion(t_h, x), dW)


def interpolate_all(path : EulerPath, bm : BrownianPath):
  """ The continuous interpolation evaluated at every node of the finer grid """
  check_refines(path, bm)
  factor = bm.grid.n // path.grid.n
  fine = bm.grid

  coarse = path.states[..., :-1, :]
  nodes = path.grid.nodes[:-1]
  drift = np.stack([path.drift(t, coarse[..., k, :]) for k, t in enumerate(nodes)], axis=-2)
  diffusion = np.stack([path.diffusion(t, coarse[..., k, :]) for k, t in enumerate(nodes)], axis=-3)

  offsets = np.arange(factor)
  elapsed = np.tile(offsets * fine.h, path.grid.n)
  W = bm.cumulative
  dW = W[..., :-1, :] - np.repeat(W[..., 0:-1:factor, :], factor, axis=-2)

  inner = np.repeat(coarse, factor, axis=-2)\
    + np.repeat(drift, factor, axis=-2) * elapsed[:, None]\
    + diffuse(np.repeat(diffusion, factor, axis=-3), dW)
  return np.concatenate([inner, path.states[..., -1:, :]], axis=-2)
