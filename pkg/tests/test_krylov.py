import numpy as np
import pytest
from scipy.special import erf

from eulerchaos.brownian import StreamKey, sample_brownian_batch
from eulerchaos.engine import load_rule, simulate_discretized_ito
from eulerchaos.errors import DegenerateFamily, InvalidArgument, Unsupported
from eulerchaos.krylov import GridFunction, GridFunctionFamily, ball_indicator_family,\
  ball_indicator_function, krylov_ratio, lp_seq_norm, occupation_average, quadrature_function,\
  zero_family
from eulerchaos.timegrid import make_grid


def brownian_paths(N, replications, dim=1, seed=0, rule="brownian"):
  grid = make_grid(1.0, N)
  bm = sample_brownian_batch(grid, dim, StreamKey(seed).children("krylov", replications), j=1)
  return simulate_discretized_ito(load_rule(rule, dim=dim), np.zeros(dim), N, bm, record_trace=False)


def constant_family(N, c=1.0):
  return GridFunctionFamily([GridFunction(lambda x: np.full(x.shape[:-1], c), norm=lambda p: c, tag="const")] * N)


def test_ball_norms():
  assert ball_indicator_function(1.0, 1).lp_norm(2) == pytest.approx(np.sqrt(2))
  assert ball_indicator_function(1.0, 2).lp_norm(1) == pytest.approx(np.pi)
  assert ball_indicator_function(0.5, 1).lp_norm(2) == pytest.approx(1.0)

  with pytest.raises(InvalidArgument):
    ball_indicator_function(0.0, 1)


def test_quadrature_norm_matches_closed_form():
  ball = ball_indicator_function(1.0, 2)
  f = quadrature_function(ball, box=(-1.5, 1.5, 2), resolution=512)
  assert f.lp_norm(2) == pytest.approx(ball.lp_norm(2), rel=1e-2)


def test_missing_norm():
  f = GridFunction(lambda x: np.ones(x.shape[:-1]))
  with pytest.raises(Unsupported):
    lp_seq_norm(GridFunctionFamily([f] * 3), 2)


def test_occupation_of_constants():
  paths = brownian_paths(4, 20)
  assert occupation_average(paths, zero_family(4)).value == 0.0
  ones = occupation_average(paths, constant_family(4))
  assert ones.value == 1.0 and ones.stderr == 0.0


def test_occupation_of_brownian_motion():
  N, R = 4, 4000
  estimate = occupation_average(brownian_paths(N, R, seed=3), ball_indicator_family(1.0, 1, N))

  times = np.arange(1, N + 1) / N
  expected = np.mean(erf(1 / np.sqrt(2 * times)))
  assert expected == pytest.approx(0.808, abs=1e-3)
  assert abs(estimate.value - expected) < 3 * estimate.stderr
  assert estimate.replications == R


def test_mismatched_steps():
  with pytest.raises(InvalidArgument):
    occupation_average(brownian_paths(4, 2), ball_indicator_family(1.0, 1, 8))


def test_lp_seq_norm():
  c = 3.0
  assert lp_seq_norm(constant_family(5, c), 2) == pytest.approx(c)
  assert lp_seq_norm(ball_indicator_family(1.0, 1, 4), 2) == pytest.approx(np.sqrt(2))

  zero = GridFunction(lambda x: np.zeros(x.shape[:-1]), norm=lambda p: 0.0, tag="zero")
  mixed = GridFunctionFamily([zero, constant_family(1, c).members[0]])
  assert not mixed.identical
  assert lp_seq_norm(mixed, 2) == pytest.approx(c / np.sqrt(2))

  with pytest.raises(InvalidArgument):
    lp_seq_norm(mixed, 1.0)


def test_degenerate_family():
  with pytest.raises(DegenerateFamily):
    krylov_ratio(brownian_paths(4, 10), zero_family(4), 3.0)


def test_ratio_of_balls():
  ratio = krylov_ratio(brownian_paths(16, 200, rule="sin_switch"), ball_indicator_family(0.5, 1, 16), 3.0)
  assert np.isfinite(ratio.value) and ratio.value > 0
  assert ratio.interval[0] <= ratio.value <= ratio.interval[1]
  assert ratio.norm == pytest.approx(1.0 ** (1 / 3))


def test_time_independent_ratio():
  paths = brownian_paths(16, 100, dim=2)
  family = ball_indicator_family(0.5, 2, 16)
  ratio = krylov_ratio(paths, family, 3.0, time_independent=True)
  assert ratio.norm == pytest.approx((np.pi / 4) ** (1 / 3))

  with pytest.raises(InvalidArgument):
    krylov_ratio(paths, family, 1.5, time_independent=True)

  mixed = GridFunctionFamily(family.members[:-1] + [family.members[0].scaled(2.0)])
  with pytest.raises(InvalidArgument):
    krylov_ratio(paths, mixed, 3.0, time_independent=True)


def test_scaling_cancels():
  paths = brownian_paths(8, 50)
  family = ball_indicator_family(1.0, 1, 8)
  base = krylov_ratio(paths, family, 3.0)
  scaled = krylov_ratio(paths, family.scaled(4.0), 3.0)
  assert scaled.value == pytest.approx(base.value)


@pytest.mark.slow
def test_ratios_bounded_while_occupation_vanishes():
  N, dim = 64, 1
  paths = brownian_paths(N, 2000, dim=dim, seed=5, rule="sin_switch")
  p = dim + 2

  ratios, occupations = [], []
  for r in [1.0, 0.5, 0.25, 0.125]:
    ratio = krylov_ratio(paths, ball_indicator_family(r, dim, N), p)
    ratios.append(ratio.value)
    occupations.append(ratio.occupation.value)

  assert all(a > b for a, b in zip(occupations, occupations[1:]))
  assert all(np.isfinite(ratios)) and max(ratios) < 1.0
