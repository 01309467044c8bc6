""" Experiment runners, one per kind. Each turns a config into ResultRows. """
import time
from contextlib import contextmanager
from multiprocessing import cpu_count

import numpy as np

from .brownian import StreamKey, coarsen, sample_brownian_batch
from .coefficients.catalog import load_interaction, load_model
from .coefficients.fields import InteractionKernel
from .coefficients.smoothing import Mollifier, mollify
from .config.experiment import Embedding, ExperimentConfig, Kind, params_of
from .diagnostics import ErrorEstimate, difference_estimate, estimate, fit_rate, holder_ratio,\
  jackknife, kernel_average_deviation, load_test_function, mollification_gap,\
  occupation_integrals, strong_error, strong_rms_error, sup_moment, sup_square_samples,\
  terminal_wasserstein, weak_occupation_error, worst_path
from .engine import EulerPath, exact_ou, interpolate_all, load_rule, sample_aux,\
  simulate_discretized_ito, simulate_euler
from .errors import EulerChaosError, InvalidArgument
from .io.logging import debug, error, info, log_sweep_point, warning
from .io.pprint import pformat_config
from .io.report import report_rows
from .io.results import ResultRow, json_filename, read_csv, write_csv, write_json
from .krylov import ball_indicator_family, occupation_samples, ratio_from
from .meanfield import ParticleEnsemble, load_law, simulate_mckean, simulate_particle_system,\
  simulate_pool, stack_ensembles
from .threading import chunk_ranges, parmap_list
from .timegrid import make_grid

# Replications simulated together, bounds memory for long fine grids
chunk_size = 512


class Recorder(object):
  """ Collects the rows of one run, stamping each with the run's coordinates """

  def __init__(self, config : ExperimentConfig, model):
    self.config = config
    self.model = model
    self.rows = []
    self.restart()

  def restart(self):
    self.start = time.perf_counter()

  def add(self, metric, value, stderr=None, model=None, suffix=None, **coords):
    config = self.config
    experiment_id = config.experiment_id or config.kind.name
    row = ResultRow(
      experiment_id=experiment_id if suffix is None else f"{experiment_id}/{suffix}",
      kind=config.kind.name,
      model=model or self.model,
      metric=metric,
      value=float(value),
      seed=config.seed,
      stderr=None if stderr is None else float(stderr),
      wall_ms=round((time.perf_counter() - self.start) * 1000, 3),
      **coords)

    debug(f"{metric} {coords} = {row.value:.6g}")
    self.rows.append(row)
    return row

  def add_estimate(self, metric, e : ErrorEstimate, **coords):
    return self.add(metric, e.value, e.stderr, replications=e.replications, **coords)

  def add_rate(self, metric, points, **coords):
    if len(points) < 3:
      warning(f"{metric}: {len(points)} sweep points, need 3 for a rate")
      return None

    fit = fit_rate(points)
    info(f"{metric}: slope {fit.slope:.4f} ± {fit.slope_stderr:.3g}, r² = {fit.r_squared:.4f}")
    self.add(metric, fit.slope, fit.slope_stderr, **coords)
    return fit


@contextmanager
def sweep_point(rec : Recorder, **coords):
  info(f"{rec.config.kind.name}: {coords}")
  rec.restart()
  try:
    yield
  except EulerChaosError as e:
    error(f"{rec.config.kind.name} failed at {coords}: {e}")
    raise
  log_sweep_point(coords, (time.perf_counter() - rec.start) * 1000)


def initial_point(config):
  x0 = np.array(config.x0, dtype=np.float64)
  return np.full(config.dim, x0[0]) if len(x0) == 1 else x0


def replication_chunks(keys):
  return [keys[start:stop] for start, stop in chunk_ranges(len(keys), -(-len(keys) // chunk_size))]


def run_simulate(config, rec, threads):
  model = load_model(config.model, params_of(config, 'model'), config.dim)
  grid = make_grid(config.T, config.n)
  master = StreamKey(config.seed)
  keys = master.children("simulate", config.replications)

  coords = dict(h=grid.h, n_steps=grid.n, replications=config.replications)
  with sweep_point(rec, **coords):
    bm = sample_brownian_batch(grid, config.dim, keys, j=threads)
    path = simulate_euler(model.drift, model.diffusion, initial_point(config), grid, bm)

    mean, stderr = jackknife(path.terminal[..., 0])
    rec.add("terminal_mean", mean, stderr, **coords)
    rec.add_estimate("terminal_second_moment", estimate(np.sum(path.terminal ** 2, axis=-1)),
      h=grid.h, n_steps=grid.n)
    rec.add_estimate("sup_moment", sup_moment(path, config.beta), h=grid.h, n_steps=grid.n, beta=config.beta)
    rec.add("holder_ratio", holder_ratio(path, config.beta), beta=config.beta, **coords)


def embed(path : EulerPath, fine_bm, embedding : Embedding):
  """ A coarse Euler path placed on the nodes the strong error is measured on """
  fine = fine_bm.grid
  if embedding == Embedding.nodes or path.grid == fine:
    return path
  if embedding == Embedding.floor:
    return EulerPath(fine, path.floored(fine), keys=path.keys)
  return EulerPath(fine, interpolate_all(path, fine_bm), keys=path.keys)


def run_converge(config, rec, threads):
  model = load_model(config.model, params_of(config, 'model'), config.dim)
  f = load_test_function(config.test_function)
  ns = sorted(set(config.n_sweep))

  exact = config.model == "ou"
  fine = make_grid(config.T, ns[-1] * config.ref_factor)
  for n in ns:
    if fine.n % n != 0:
      raise InvalidArgument(f"converge: n={n} does not divide the reference grid n={fine.n}")

  x0 = initial_point(config)
  master = StreamKey(config.seed)
  keys = master.children("converge", config.replications)

  sup_squares = {n: [] for n in ns}
  occupation = {n: [] for n in ns}
  reference_occupation = []

  with sweep_point(rec, reference_n=fine.n, exact=exact):
    for chunk in replication_chunks(keys):
      bm = sample_brownian_batch(fine, config.dim, chunk, j=threads, progress=None)
      if exact:
        reference = exact_ou(model.params.theta, model.params.sigma, x0, fine, bm)
      else:
        reference = simulate_euler(model.drift, model.diffusion, x0, fine, bm)
      reference_occupation.append(occupation_integrals(reference, f))

      for n in ns:
        grid = make_grid(config.T, n)
        path = simulate_euler(model.drift, model.diffusion, x0, grid, coarsen(bm, fine.n // n))
        sup_squares[n].append(sup_square_samples(embed(path, bm, config.embedding), reference))
        occupation[n].append(occupation_integrals(path, f))

  reference_occupation = np.concatenate(reference_occupation)
  points = []
  for n in ns:
    grid = make_grid(config.T, n)
    with sweep_point(rec, h=grid.h, n_steps=n):
      rms = worst_path(np.concatenate(sup_squares[n]), np.sqrt)
      rec.add_estimate("strong_rms_error", rms, h=grid.h, n_steps=n)

      weak = difference_estimate(np.concatenate(occupation[n]), reference_occupation)
      rec.add_estimate("weak_occupation_error", weak, h=grid.h, n_steps=n)
      if rms.value > 0:
        points.append((grid.h, rms.value))

  rec.add_rate("rate_slope", points, replications=config.replications)


def run_krylov(config, rec, threads):
  dim = config.dim
  model = load_model(config.model, params_of(config, 'model'), dim) if config.rule == "euler" else None
  rule = load_rule(config.rule, params_of(config, 'rule'), dim, model=model)

  x0 = initial_point(config)
  master = StreamKey(config.seed)
  keys = master.children("krylov", config.replications)
  radii = sorted(set(config.radius_sweep), reverse=True)

  max_ratios = []
  for N in sorted(set(config.steps_sweep)):
    grid = make_grid(1.0, N)
    families = {r: ball_indicator_family(r, dim, N) for r in radii}
    samples = {r: [] for r in radii}

    with sweep_point(rec, n_steps=N, rule=rule.name):
      for chunk in replication_chunks(keys):
        bm = sample_brownian_batch(grid, dim, chunk, j=threads, progress=None)
        aux = sample_aux(chunk, N, rule.aux_dim)
        path = simulate_discretized_ito(rule, x0, N, bm, aux, record_trace=False)
        for r in radii:
          samples[r].append(occupation_samples(path, families[r]))

      ratios = []
      for r in radii:
        coords = dict(h=grid.h, n_steps=N, suffix=f"r={r:g}")
        occupation = estimate(np.concatenate(samples[r]), N=N, r=r)
        rec.add_estimate("occupation_average", occupation, **coords)

        ratio = ratio_from(occupation, families[r], config.p, dim)
        rec.add("krylov_ratio", ratio.value, ratio.stderr, p=config.p,
          replications=occupation.replications, **coords)
        ratios.append(ratio.value)

        if config.p > dim:
          stationary = ratio_from(occupation, families[r], config.p, dim, time_independent=True)
          rec.add("krylov_ratio_time_independent", stationary.value, stationary.stderr, p=config.p,
            replications=occupation.replications, **coords)

      rec.add("max_ratio", max(ratios), p=config.p, h=grid.h, n_steps=N)
      max_ratios.append((N, max(ratios)))

  rec.add_rate("max_ratio_slope", max_ratios, p=config.p, replications=config.replications)


def chaos_replication(kernel, law, grid, master, pool, particle_counts, tracked, iid_count, noise_grid):
  """ Paired particle systems and i.i.d. copies for one replication """
  iid = simulate_mckean(kernel, law, iid_count, pool.N, grid, master, pool=pool, noise_grid=noise_grid)
  heads, smallest = {}, None

  for N in particle_counts:
    system = simulate_particle_system(kernel, law, N, grid, master, noise_grid=noise_grid)
    heads[N] = system.head(min(tracked, N))
    if smallest is None:
      smallest = system

  return iid, heads, smallest


def run_chaos(config, rec, threads):
  kernel = load_interaction(config.kernel, params_of(config, 'kernel'), config.dim)
  law = load_law(config.law, params_of(config, 'law'), config.dim)
  counts = sorted(set(config.particles_sweep))

  if config.tracked > config.pool:
    raise InvalidArgument(f"chaos: tracked={config.tracked} exceeds pool={config.pool}")

  closed_form = isinstance(kernel, InteractionKernel) and kernel.mean_field is not None
  if not closed_form:
    warning(f"kernel {kernel.name} has no closed-form mean field, kernel_average_deviation is skipped")

  iid_count = min(config.pool, counts[-1] if closed_form else min(config.tracked, counts[-1]))
  master = StreamKey(config.seed)
  replications = master.children("chaos", config.replications)

  ns = sorted(set(config.n_sweep or [config.n]))
  fine = make_grid(config.T, ns[-1])
  for n in ns:
    if fine.n % n != 0:
      raise InvalidArgument(f"chaos: n={n} does not divide the finest n={fine.n}")

  for n in ns:
    grid = make_grid(config.T, n)
    with sweep_point(rec, h=grid.h, pool=config.pool):
      pool = simulate_pool(kernel, law, config.pool, grid, master, noise_grid=fine)

      def replicate(key):
        return chaos_replication(kernel, law, grid, key, pool, counts, config.tracked, iid_count, fine)

      results = parmap_list(replicate, replications, j=threads)
      iid = stack_ensembles([r[0] for r in results])

    errors, deviations = [], []
    for N in counts:
      with sweep_point(rec, h=grid.h, n_particles=N):
        particles = stack_ensembles([r[1][N] for r in results])
        chaos = strong_error(particles, iid.head(particles.N))
        rec.add_estimate("chaos_sup_error", chaos, h=grid.h, n_steps=n, n_particles=N)
        if chaos.value > 0:
          errors.append((N, chaos.value))

        if closed_form and N <= iid.N:
          deviation = kernel_average_deviation(iid, kernel, grid.T, N=N)
          rec.add_estimate("kernel_average_deviation", deviation, h=grid.h, n_steps=n, n_particles=N)
          if deviation.value > 0:
            deviations.append((N, deviation.value))

    rec.add_rate("chaos_rate_slope", errors, h=grid.h, n_steps=n)
    if closed_form:
      rec.add_rate("deviation_rate_slope", deviations, h=grid.h, n_steps=n)

    if isinstance(kernel, InteractionKernel):
      moll = Mollifier(config.mollifier_eps, config.mollifier_nodes)
      with sweep_point(rec, h=grid.h, n_particles=counts[0], epsilon=moll.epsilon):
        smallest = stack_ensembles([r[2] for r in results])
        gap = mollification_gap(smallest, kernel, mollify(kernel, moll))
        rec.add_estimate("mollification_gap", gap, h=grid.h, n_steps=n, n_particles=counts[0],
          suffix=f"eps={moll.epsilon:g}")


def pool_copies(pool : ParticleEnsemble, fine=None):
  """ Pool copies as replications (M, 1, n+1, d). On a finer grid they are held
  constant between their own nodes.
  """
  x, grid = pool.trajectories, pool.grid
  if fine is not None and fine != grid:
    factor = fine.n // grid.n
    x = np.concatenate([np.repeat(x[:, :-1], factor, axis=-2), x[:, -1:]], axis=-2)
    grid = fine
  return ParticleEnsemble(grid, x[:, None], pool.initial[:, None])


def run_meanfield(config, rec, threads):
  kernel = load_interaction(config.kernel, params_of(config, 'kernel'), config.dim)
  law = load_law(config.law, params_of(config, 'law'), config.dim)
  f = load_test_function(config.test_function)
  ns = sorted(set(config.n_sweep or [config.n]))
  counts = sorted(set(config.particles_sweep or [config.particles]))
  master = StreamKey(config.seed)

  # every h is driven by the same Brownian paths, drawn on the finest grid
  fine = make_grid(config.T, ns[-1])
  for n in ns:
    if fine.n % n != 0:
      raise InvalidArgument(f"meanfield: n={n} does not divide the finest n={fine.n}")

  pools = {}
  for n in ns:
    grid = make_grid(config.T, n)
    with sweep_point(rec, h=grid.h, pool=config.pool):
      pool = simulate_pool(kernel, law, config.pool, grid, master, noise_grid=fine)
      paths = pool.trajectories

      mean, stderr = jackknife(paths[:, -1, 0])
      rec.add("pool_mean", mean, stderr, h=grid.h, n_steps=n, replications=config.pool)
      rec.add_estimate("sup_moment", sup_moment(paths, config.beta), h=grid.h, n_steps=n, beta=config.beta)
      pools[n] = pool

  reference = pool_copies(pools[ns[-1]])
  points = []
  for n in ns[:-1]:
    grid = make_grid(config.T, n)
    with sweep_point(rec, h=grid.h, reference_n=fine.n):
      rms = strong_rms_error(pool_copies(pools[n], fine), reference)
      rec.add_estimate("strong_rms_error", rms, h=grid.h, n_steps=n)
      if rms.value > 0:
        points.append((grid.h, rms.value))

      weak = weak_occupation_error(pool_copies(pools[n]), f, reference)
      rec.add_estimate("weak_occupation_error", weak, h=grid.h, n_steps=n)
      rec.add("terminal_w1", terminal_wasserstein(pools[n], pools[ns[-1]]), h=grid.h, n_steps=n,
        replications=config.pool)

  rec.add_rate("rate_slope", points, replications=config.pool)

  replications = master.children("meanfield", config.replications)
  for n in ns:
    grid = make_grid(config.T, n)
    for N in counts:
      with sweep_point(rec, h=grid.h, n_particles=N):
        def system(key):
          return simulate_particle_system(kernel, law, N, grid, key, noise_grid=fine)

        systems = parmap_list(system, replications, j=threads)
        moment = sup_moment(stack_ensembles(systems), config.beta)
        rec.add_estimate("particle_sup_moment", moment, h=grid.h, n_steps=n, n_particles=N, beta=config.beta)


def slope_axis(group):
  """ h when it varies within the group, otherwise the particle count """
  for k in ['h', 'n_particles', 'n_steps']:
    values = {getattr(row, k) for row in group}
    if None not in values and len(values) >= 3:
      return k
  return None


def run_report(config, rec, threads):
  rows = [row for filename in config.inputs for row in read_csv(filename)]
  report_rows(rows)

  groups = {}
  for row in rows:
    if not row.metric.endswith("_slope"):
      groups.setdefault((row.model, row.experiment_id, row.metric), []).append(row)

  for (model, experiment_id, metric), group in groups.items():
    axis = slope_axis(group)
    points = [(getattr(row, axis), row.value) for row in group if row.value > 0] if axis else []
    if len(points) >= 3:
      fit = fit_rate(points)
      rec.add(f"{metric}_slope", fit.slope, fit.slope_stderr, model=model,
        suffix=experiment_id, replications=len(points))


runners = {
  Kind.simulate: run_simulate,
  Kind.converge: run_converge,
  Kind.krylov: run_krylov,
  Kind.chaos: run_chaos,
  Kind.meanfield: run_meanfield,
  Kind.report: run_report
}


def subject(config : ExperimentConfig):
  if config.kind in [Kind.chaos, Kind.meanfield]:
    return config.kernel
  if config.kind == Kind.krylov:
    return config.rule
  return config.model


def run(config : ExperimentConfig):
  """ Run the experiment, write its CSV (and JSON mirror) and return the rows """
  threads = config.threads or max(1, cpu_count() - 1)
  info(f"Experiment {config.kind.name}, {threads} threads:")
  info(pformat_config(config))

  if config.weak_continuity_assumed:
    info("Measure coefficients are assumed weakly continuous (not checked)")

  rec = Recorder(config, subject(config))
  runners[config.kind](config, rec, threads)

  write_csv(rec.rows, config.out)
  if config.json:
    write_json(rec.rows, json_filename(config.out))
  return rec.rows
