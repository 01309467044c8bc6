import numpy as np
import pytest

from eulerchaos.brownian import StreamKey, coarsen, sample_brownian
from eulerchaos.coefficients.catalog import load_interaction, load_kernel
from eulerchaos.coefficients.fields import DiffusionField, DriftField, InteractionKernel, identity_like
from eulerchaos.diagnostics import jackknife
from eulerchaos.engine import simulate_euler
from eulerchaos.errors import InvalidArgument, NumericFailure
from eulerchaos.meanfield import IidEnsemble, load_law, simulate_mckean, simulate_particle_system,\
  simulate_pool, stack_ensembles
from eulerchaos.timegrid import make_grid


def test_laws():
  key = StreamKey(0).child("initial")
  np.testing.assert_array_equal(load_law("dirac", {'point': 2.0}, dim=3).sample(key), [2.0, 2.0, 2.0])

  law = load_law("uniform", {'low': -1, 'high': 1}, dim=2)
  points = law.sample_many(StreamKey(0).children("initial", 100))
  assert points.shape == (100, 2)
  assert np.all((points >= -1) & (points <= 1))
  assert law.density.lq_loc

  np.testing.assert_array_equal(law.sample(key), law.sample(key))

  with pytest.raises(InvalidArgument):
    load_law("uniform", {'low': 1, 'high': 0})
  with pytest.raises(InvalidArgument):
    load_law("cauchy")


def test_single_particle_is_self_interacting_sde():
  grid = make_grid(1.0, 16)
  master = StreamKey(3)
  system = simulate_particle_system(load_kernel("mean"), load_law("dirac"), 1, grid, master)

  key = master.child("particle", 0)
  b = DriftField(lambda t, x: x)
  sigma = DiffusionField(lambda t, x: identity_like(x))
  euler = simulate_euler(b, sigma, [1.0], grid, sample_brownian(grid, 1, key))
  np.testing.assert_allclose(system.trajectories[0], euler.states, atol=1e-14)


def test_noiseless_mean_grows_geometrically():
  grid = make_grid(1.0, 8)
  kernel = InteractionKernel(lambda t, x, y: y,
    lambda t, x, y: identity_like(np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)), 0.0))
  system = simulate_particle_system(kernel, load_law("dirac"), 4, grid, StreamKey(0))

  means = system.trajectories[..., 0].mean(axis=0)
  np.testing.assert_allclose(means, (1 + grid.h) ** np.arange(grid.n + 1), rtol=1e-12)


def test_particle_mean_matches_moment_recursion():
  grid = make_grid(1.0, 16)
  keys = StreamKey(17).children("meanfield", 200)
  systems = [simulate_particle_system(load_kernel("mean"), load_law("dirac"), 16, grid, key) for key in keys]
  means = stack_ensembles(systems).trajectories[:, :, -1, 0].mean(axis=1)

  value, stderr = jackknife(means)
  assert abs(value - (1 + grid.h) ** grid.n) < 4 * stderr


def test_non_interacting_copy_equals_euler():
  grid = make_grid(1.0, 16)
  master = StreamKey(21)
  kernel = load_kernel("independent_ou")
  iid = simulate_mckean(kernel, load_law("dirac"), 3, 5, grid, master)

  b = DriftField(lambda t, x: -1.0 * x)
  sigma = DiffusionField(lambda t, x: identity_like(x, 1.0))
  for j in range(3):
    bm = sample_brownian(grid, 1, master.child("particle", j))
    euler = simulate_euler(b, sigma, [1.0], grid, bm)
    np.testing.assert_array_equal(iid.trajectories[j], euler.states)


def test_pool_with_tracked_keys_equals_tracked():
  grid = make_grid(1.0, 8)
  master = StreamKey(5)
  kernel, law = load_kernel("bounded_discontinuous"), load_law("uniform")
  keys = master.children("particle", 4)

  iid = simulate_mckean(kernel, law, 4, 4, grid, master, pool_keys=keys)
  np.testing.assert_array_equal(iid.trajectories, iid.law_pool)
  assert iid.M == 4


def test_permutation_equivariance():
  grid = make_grid(1.0, 8)
  master = StreamKey(9)
  kernel, law = load_kernel("bounded_discontinuous"), load_law("gaussian")
  keys = master.children("particle", 6)
  order = [3, 0, 5, 1, 4, 2]

  system = simulate_particle_system(kernel, law, 6, grid, master, keys=keys)
  permuted = simulate_particle_system(kernel, law, 6, grid, master, keys=[keys[i] for i in order])
  np.testing.assert_array_equal(permuted.trajectories, system.trajectories[order])


def test_measure_coefficient_matches_kernel():
  grid = make_grid(1.0, 8)
  master = StreamKey(2)
  law = load_law("gaussian")
  direct = simulate_particle_system(load_interaction("mean_field_ou"), law, 8, grid, master)
  kernel = simulate_particle_system(load_kernel("attractive"), law, 8, grid, master)
  np.testing.assert_array_equal(direct.trajectories, kernel.trajectories)


def test_pool_is_disjoint_from_particles():
  grid = make_grid(1.0, 4)
  master = StreamKey(1)
  kernel, law = load_kernel("mean"), load_law("gaussian")
  pool = simulate_pool(kernel, law, 4, grid, master)
  system = simulate_particle_system(kernel, law, 4, grid, master)
  assert pool.particle_keys != system.particle_keys
  assert np.all(pool.initial != system.initial)


def test_precomputed_pool():
  grid = make_grid(1.0, 4)
  master = StreamKey(1)
  kernel, law = load_kernel("mean"), load_law("gaussian")
  pool = simulate_pool(kernel, law, 8, grid, master)

  shared = simulate_mckean(kernel, law, 2, 8, grid, master, pool=pool)
  fresh = simulate_mckean(kernel, law, 2, 8, grid, master)
  np.testing.assert_array_equal(shared.trajectories, fresh.trajectories)

  with pytest.raises(InvalidArgument):
    simulate_mckean(kernel, law, 2, 4, grid, master, pool=pool)


def test_invalid_counts():
  grid = make_grid(1.0, 4)
  kernel, law = load_kernel("mean"), load_law("dirac")
  with pytest.raises(InvalidArgument):
    simulate_particle_system(kernel, law, 0, grid, StreamKey(0))
  with pytest.raises(InvalidArgument):
    simulate_mckean(kernel, law, 4, 2, grid, StreamKey(0))
  with pytest.raises(InvalidArgument):
    simulate_particle_system(kernel, law, 3, grid, StreamKey(0), keys=StreamKey(0).children("particle", 2))


def test_non_finite_particle():
  kernel = InteractionKernel(lambda t, x, y: np.where(x > 0, np.inf, 0.0) + 0 * y,
    lambda t, x, y: identity_like(np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape))))
  with pytest.raises(NumericFailure) as failure:
    simulate_particle_system(kernel, load_law("dirac"), 3, make_grid(1.0, 4), StreamKey(0))
  assert failure.value.step == 0 and failure.value.particle == 0


def test_stack_and_head():
  grid = make_grid(1.0, 4)
  kernel, law = load_kernel("mean"), load_law("gaussian")
  masters = StreamKey(8).children("chaos", 3)

  systems = [simulate_particle_system(kernel, law, 5, grid, key) for key in masters]
  stacked = stack_ensembles(systems)
  assert stacked.trajectories.shape == (3, 5, 5, 1)
  assert stacked.keys == tuple(masters)
  assert stacked.N == 5 and stacked.replications == (3,)

  head = stacked.head(2)
  assert head.N == 2 and head.keys == stacked.keys
  np.testing.assert_array_equal(head.trajectories, stacked.trajectories[:, :2])

  pool = simulate_pool(kernel, law, 6, grid, StreamKey(8))
  copies = stack_ensembles([simulate_mckean(kernel, law, 2, 6, grid, key, pool=pool) for key in masters])
  assert isinstance(copies, IidEnsemble)
  assert copies.law_pool is pool.trajectories


def test_measure_of_ensemble():
  grid = make_grid(1.0, 4)
  system = simulate_particle_system(load_kernel("mean"), load_law("gaussian"), 5, grid, StreamKey(0))
  mu = system.measure(0)
  assert len(mu) == 5
  np.testing.assert_array_equal(mu.atoms, system.initial)


def test_zero_interaction_system_equals_iid_copies():
  grid = make_grid(1.0, 16)
  master = StreamKey(12)
  kernel, law = load_kernel("independent_ou"), load_law("gaussian")

  system = simulate_particle_system(kernel, law, 4, grid, master)
  iid = simulate_mckean(kernel, law, 4, 8, grid, master)
  np.testing.assert_array_equal(system.trajectories, iid.trajectories)
  assert system.particle_keys == iid.particle_keys


def test_noise_drawn_on_finer_grid_is_coarsened():
  fine, grid = make_grid(1.0, 32), make_grid(1.0, 8)
  master = StreamKey(14)
  system = simulate_particle_system(load_kernel("independent_ou"), load_law("dirac"), 2, grid, master,
    noise_grid=fine)

  b = DriftField(lambda t, x: -1.0 * x)
  sigma = DiffusionField(lambda t, x: identity_like(x, 1.0))
  for j in range(2):
    bm = coarsen(sample_brownian(fine, 1, master.child("particle", j)), 4)
    euler = simulate_euler(b, sigma, [1.0], grid, bm)
    np.testing.assert_array_equal(system.trajectories[j], euler.states)

  with pytest.raises(InvalidArgument):
    simulate_particle_system(load_kernel("mean"), load_law("dirac"), 2, make_grid(1.0, 3), master,
      noise_grid=fine)


def test_shared_noise_couples_step_sizes():
  fine = make_grid(1.0, 64)
  master = StreamKey(15)
  kernel, law = load_kernel("mean"), load_law("dirac")
  coarse = simulate_pool(kernel, law, 256, make_grid(1.0, 32), master, noise_grid=fine)
  finest = simulate_pool(kernel, law, 256, fine, master)
  independent = simulate_pool(kernel, law, 256, make_grid(1.0, 32), StreamKey(16))

  coupled = np.mean((coarse.trajectories[:, -1] - finest.trajectories[:, -1]) ** 2)
  uncoupled = np.mean((independent.trajectories[:, -1] - finest.trajectories[:, -1]) ** 2)
  assert coupled < 0.1 * uncoupled


@pytest.mark.slow
def test_particle_mean_at_horizon_is_e():
  grid = make_grid(1.0, 256)
  keys = StreamKey(2718).children("meanfield", 64)
  systems = [simulate_particle_system(load_kernel("mean"), load_law("dirac"), 512, grid, key) for key in keys]
  means = stack_ensembles(systems).trajectories[:, :, -1, 0].mean(axis=1)

  value, stderr = jackknife(means)
  bias = np.e - (1 + grid.h) ** grid.n
  assert abs(value - np.e) < 3 * stderr + bias


@pytest.mark.slow
def test_pool_mean_at_horizon_is_e():
  grid = make_grid(1.0, 256)
  pool = simulate_pool(load_kernel("mean"), load_law("dirac"), 8192, grid, StreamKey(2718))

  value, stderr = jackknife(pool.trajectories[:, -1, 0])
  bias = np.e - (1 + grid.h) ** grid.n
  assert abs(value - np.e) < 3 * stderr + bias
