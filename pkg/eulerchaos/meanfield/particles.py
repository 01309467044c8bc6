from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from structs.struct import struct

from eulerchaos.brownian import StreamKey, sample_increments
from eulerchaos.coefficients.catalog import load_entry
from eulerchaos.coefficients.fields import InteractionKernel, as_measure_coefficient
from eulerchaos.engine.euler import check_finite, diffuse
from eulerchaos.errors import InvalidArgument
from eulerchaos.reduce import block_sums
from eulerchaos.timegrid import TimeGrid
from .measure import EmpiricalMeasure


class InitialLaw(object):
  """ Law of the initial condition, sampled one point per stream key.
  density describes the law when it has one: struct(name, params, lq_loc).
  """

  def __init__(self, sampler : Callable, dim : int, name="law", density=None):
    self.sampler = sampler
    self.dim = dim
    self.name = name
    self.density = density

  def sample(self, key : StreamKey):
    point = np.asarray(self.sampler(key.generator(), self.dim), dtype=np.float64)
    assert point.shape == (self.dim,), f"InitialLaw {self.name}: sampler returned {point.shape}"
    return point

  def sample_many(self, keys):
    return np.stack([self.sample(key) for key in keys]).reshape(len(keys), self.dim)

  def __repr__(self):
    return f"InitialLaw({self.name}, d={self.dim})"


@dataclass
class DiracParams:
  point: float = 1.0

def dirac(dim, point=1.0):
  return InitialLaw(lambda rng, d: np.full(d, float(point)), dim, name="dirac")


@dataclass
class UniformParams:
  low: float = 0.0
  high: float = 2.0

def uniform(dim, low=0.0, high=2.0):
  if not high > low:
    raise InvalidArgument(f"uniform law: need low < high, got [{low}, {high}]")

  density = struct(name="uniform", params=struct(low=low, high=high), lq_loc=True)
  return InitialLaw(lambda rng, d: rng.uniform(low, high, size=d), dim, name="uniform", density=density)


@dataclass
class GaussianParams:
  mean: float = 0.0
  std: float = 1.0

def gaussian(dim, mean=0.0, std=1.0):
  if not std > 0:
    raise InvalidArgument(f"gaussian law: std must be positive, got {std}")

  density = struct(name="gaussian", params=struct(mean=mean, std=std), lq_loc=True)
  return InitialLaw(lambda rng, d: mean + std * rng.standard_normal(d), dim, name="gaussian", density=density)


laws = dict(
  dirac=(DiracParams, dirac),
  uniform=(UniformParams, uniform),
  gaussian=(GaussianParams, gaussian)
)


def load_law(name, params=None, dim=1):
  return load_entry(laws, "law", name, params, dim=dim)


class ParticleEnsemble(object):
  """ Trajectories (..., N, n+1, d) of N particles, leading axes are replications.
  particle_keys drive the particles of a single replication, keys holds the
  master key of each replication.
  """

  def __init__(self, grid : TimeGrid, trajectories, initial, particle_keys=None, keys=None):
    trajectories = np.asarray(trajectories)
    assert trajectories.ndim >= 3 and trajectories.shape[-2] == grid.n + 1,\
      f"{type(self).__name__}: expected trajectories (..., N, {grid.n + 1}, d), got {trajectories.shape}"

    self.grid = grid
    self.trajectories = trajectories
    self.initial = np.asarray(initial)
    self.particle_keys = particle_keys
    self.keys = None if keys is None else tuple(keys)

  @property
  def N(self):
    return self.trajectories.shape[-3]

  @property
  def dim(self):
    return self.trajectories.shape[-1]

  @property
  def replications(self):
    return self.trajectories.shape[:-3]

  def states(self, k):
    """ Positions of every particle at node k, (..., N, d) """
    return self.trajectories[..., k, :]

  def head(self, J):
    """ The first J particles, same replications """
    assert 1 <= J <= self.N, f"head: J={J} outside 1..{self.N}"
    keys = None if self.particle_keys is None else self.particle_keys[:J]
    return ParticleEnsemble(self.grid, self.trajectories[..., :J, :, :],
      self.initial[..., :J, :], keys, self.keys)

  def measure(self, k):
    assert len(self.replications) == 0, "measure: ensemble has replication axes"
    return EmpiricalMeasure(self.states(k))

  def __repr__(self):
    return f"{type(self).__name__}(N={self.N}, {self.grid}, replications={self.replications})"


class IidEnsemble(ParticleEnsemble):
  """ Tracked mean-field copies plus the law_pool (M, n+1, d) approximating their law """

  def __init__(self, grid, trajectories, initial, particle_keys=None, keys=None,
      law_pool=None, pool_keys=None):
    super().__init__(grid, trajectories, initial, particle_keys, keys)
    self.law_pool = law_pool
    self.pool_keys = pool_keys

  @property
  def M(self):
    return self.law_pool.shape[-3]

  def pool_measure(self, k):
    return EmpiricalMeasure(self.law_pool[..., k, :])


def stack_ensembles(ensembles):
  """ Stack single-replication ensembles along a new leading replication axis """
  assert len(ensembles) > 0, "stack_ensembles: nothing to stack"
  first = ensembles[0]
  trajectories = np.stack([e.trajectories for e in ensembles])
  initial = np.stack([e.initial for e in ensembles])
  keys = [key for e in ensembles for key in (e.keys or [None])]
  keys = None if None in keys else keys

  if isinstance(first, IidEnsemble):
    return IidEnsemble(first.grid, trajectories, initial, keys=keys,
      law_pool=first.law_pool, pool_keys=first.pool_keys)
  return ParticleEnsemble(first.grid, trajectories, initial, keys=keys)


def particle_keys(master : StreamKey, N):
  return master.children("particle", N)


def initial_draws(law : InitialLaw, keys):
  return law.sample_many([key.child("initial") for key in keys])


def driver_increments(grid, dim, keys, noise_grid=None):
  """ Increments (N, n, d) on grid. With a finer noise_grid they are drawn there
  and summed in blocks, so runs at different h share their Brownian paths.
  """
  noise_grid = noise_grid or grid
  if not grid.divides(noise_grid):
    raise InvalidArgument(f"driver_increments: {grid} is not a coarsening of {noise_grid}")

  increments = np.stack([sample_increments(noise_grid, dim, key) for key in keys])
  return block_sums(increments, noise_grid.n // grid.n)


def check_count(name, N):
  if int(N) != N or N < 1:
    raise InvalidArgument(f"{name} must be a positive integer, got {N}")
  return int(N)


def interaction_coefficients(coefficient, t, x, mu):
  """ (b_t(x_j, μ), σ_t(x_j, μ)) for every row of x, using a kernel's closed
  forms in place of the pairwise average where it declares them.
  """
  if not isinstance(coefficient, InteractionKernel):
    coefficient = as_measure_coefficient(coefficient)
    return coefficient.drift(t, x, mu), coefficient.diffusion(t, x, mu)

  kernel = coefficient
  if not kernel.interacting:
    return kernel.drift(t, x, x), kernel.diffusion(t, x, x)

  averaged = as_measure_coefficient(kernel)
  drift = kernel.mean_field or averaged.drift
  diffusion = kernel.mean_diffusion or averaged.diffusion
  d = x.shape[-1]
  return np.broadcast_to(drift(t, x, mu), x.shape),\
    np.broadcast_to(diffusion(t, x, mu), (*x.shape[:-1], d, d))


def evolve(coefficient, xi, increments, grid : TimeGrid, environment=None):
  """ Euler steps of the states xi (N, d) with frozen node-time measures.

  environment (M, n+1, d) gives the measure at each node, otherwise the states
  interact with their own empirical measure. All states read the same
  measure before any of them moves, and the measure's atoms are put in a
  canonical order so relabelling states permutes the output exactly.
  """
  N, d = xi.shape
  trajectories = np.empty((N, grid.n + 1, d))
  trajectories[:, 0] = xi
  x = xi

  for k in range(grid.n):
    t = grid.node(k)
    atoms = x if environment is None else environment[:, k]
    mu = EmpiricalMeasure(atoms).canonical()

    b, sigma = interaction_coefficients(coefficient, t, x, mu)
    check_finite(k, t, x, b, sigma, particle=True)

    x = x + b * grid.h + diffuse(sigma, increments[:, k])
    trajectories[:, k + 1] = x

  return trajectories


def simulate_particle_system(kernel, law : InitialLaw, N : int, grid : TimeGrid,
    master : StreamKey, keys=None, noise_grid=None):
  """ Interacting particle Euler system, particle j driven by (master, "particle", j)
  unless explicit per-particle keys are given. Brownian increments are drawn on
  noise_grid (default grid) and coarsened.
  """
  N = check_count("simulate_particle_system: N", N)
  keys = particle_keys(master, N) if keys is None else list(keys)
  if len(keys) != N:
    raise InvalidArgument(f"simulate_particle_system: {len(keys)} keys for {N} particles")

  xi = initial_draws(law, keys)
  increments = driver_increments(grid, law.dim, keys, noise_grid)
  trajectories = evolve(kernel, xi, increments, grid)

  return ParticleEnsemble(grid, trajectories, xi, keys, [master])


def simulate_pool(kernel, law : InitialLaw, M : int, grid : TimeGrid, master : StreamKey, keys=None,
    noise_grid=None):
  """ Self-consistent pool of M copies on stream labels disjoint from the particles """
  M = check_count("simulate_pool: M", M)
  keys = master.children("pool", M) if keys is None else keys
  return simulate_particle_system(kernel, law, M, grid, master, keys=keys, noise_grid=noise_grid)


def simulate_mckean(kernel, law : InitialLaw, J : int, M : int, grid : TimeGrid,
    master : StreamKey, pool : Optional[ParticleEnsemble] = None, pool_keys=None, noise_grid=None):
  """ J mean-field Euler copies, copy j driven by (master, "particle", j) like
  particle j of the paired interacting system. Their law is approximated by a
  pool of M copies, simulated here unless a precomputed pool is given.
  """
  J = check_count("simulate_mckean: J", J)
  M = check_count("simulate_mckean: M", M)
  if M < J:
    raise InvalidArgument(f"simulate_mckean: pool size M={M} is smaller than J={J}")

  if pool is None:
    pool = simulate_pool(kernel, law, M, grid, master, keys=pool_keys, noise_grid=noise_grid)
  elif pool.N != M or pool.grid != grid:
    raise InvalidArgument(f"simulate_mckean: pool {pool} does not match M={M}, {grid}")

  keys = particle_keys(master, J)
  xi = initial_draws(law, keys)
  increments = driver_increments(grid, law.dim, keys, noise_grid)
  trajectories = evolve(kernel, xi, increments, grid, environment=pool.trajectories)

  return IidEnsemble(grid, trajectories, xi, keys, [master],
    law_pool=pool.trajectories, pool_keys=pool.particle_keys)
