import numpy as np
import pytest

from eulerchaos.brownian import StreamKey, coarsen, sample_brownian_batch
from eulerchaos.coefficients.catalog import load_model
from eulerchaos.diagnostics import fit_rate, strong_rms_error
from eulerchaos.engine import exact_ou, simulate_euler
from eulerchaos.errors import InvalidArgument
from eulerchaos.timegrid import make_grid


def brownian(n, replications=4, dim=1, seed=1):
  grid = make_grid(1.0, n)
  return grid, sample_brownian_batch(grid, dim, StreamKey(seed).children("exact", replications), j=1)


def test_zero_theta_is_brownian():
  grid, bm = brownian(32)
  path = exact_ou(0.0, 1.0, [0.0], grid, bm)
  np.testing.assert_allclose(path.states, bm.cumulative, atol=1e-12)


def test_zero_noise_decays():
  grid, bm = brownian(10)
  path = exact_ou(0.7, 0.0, [2.0], grid, bm)
  np.testing.assert_allclose(path.states[0, :, 0], 2.0 * np.exp(-0.7 * grid.nodes), rtol=1e-12)


def test_terminal_variance():
  grid, bm = brownian(4, replications=20000, seed=5)
  theta = 1.0
  path = exact_ou(theta, 1.0, [0.0], grid, bm)

  expected = (1 - np.exp(-2 * theta)) / (2 * theta)
  assert path.terminal.var() == pytest.approx(expected, rel=0.05)


def test_grid_mismatch():
  _, bm = brownian(8)
  with pytest.raises(InvalidArgument):
    exact_ou(1.0, 1.0, [0.0], make_grid(1.0, 4), bm)


# Additive noise: on the grid nodes Euler is strong order one
def test_euler_nodes_converge_to_exact():
  fine, bm = brownian(256, replications=400, seed=11)
  exact = exact_ou(1.0, 1.0, [1.0], fine, bm)
  ou = load_model("ou")

  points = []
  for n in [8, 16, 32, 64]:
    path = simulate_euler(ou.drift, ou.diffusion, [1.0], make_grid(1.0, n), coarsen(bm, fine.n // n))
    error = strong_rms_error(path, exact)
    points.append((1.0 / n, error.value))

  errors = [e for _, e in points]
  assert all(a > b for a, b in zip(errors, errors[1:]))
  assert 0.6 < fit_rate(points).slope < 1.4
