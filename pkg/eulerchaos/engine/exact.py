import numpy as np

from eulerchaos.brownian import BrownianPath
from eulerchaos.errors import InvalidArgument
from eulerchaos.timegrid import TimeGrid
from .euler import EulerPath, diffuse, initial_states


def ou_noise_scale(theta, h):
  """ √((1 - e^{-2θh}) / (2θh)), equal to 1 in the θ → 0 limit """
  if theta == 0:
    return 1.0
  return float(np.sqrt(-np.expm1(-2 * theta * h) / (2 * theta * h)))


def exact_ou(theta, sigma0, x0, grid : TimeGrid, bm : BrownianPath):
  """ Exact-in-law OU update driven by the same increments:
  X_{k+1} = e^{-θh} X_k + σ0 √((1 - e^{-2θh})/(2θh)) ΔW_k
  """
  if bm.grid != grid:
    raise InvalidArgument(f"exact_ou: Brownian path is on {bm.grid}, expected {grid}")

  d = bm.dim
  sigma0 = np.asarray(sigma0, dtype=np.float64)
  sigma0 = np.eye(d) * sigma0 if sigma0.ndim == 0 else sigma0
  assert sigma0.shape == (d, d), f"exact_ou: expected a ({d}, {d}) diffusion, got {sigma0.shape}"

  decay = float(np.exp(-theta * grid.h))
  scaled = sigma0 * ou_noise_scale(theta, grid.h)

  x = initial_states(x0, bm.batch_shape, d)
  states = np.empty((*bm.batch_shape, grid.n + 1, d))
  states[..., 0, :] = x

  for k in range(grid.n):
    x = decay * x + diffuse(scaled, bm.increments[..., k, :])
    states[..., k + 1, :] = x

  return EulerPath(grid, states, keys=bm.keys)
