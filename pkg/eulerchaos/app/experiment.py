import sys
from dataclasses import dataclass, field

from eulerchaos.config import ExperimentOpts, Kind, RuntimeOpts, load_config, with_overrides
from eulerchaos.errors import ConfigError, EulerChaosError
from eulerchaos.experiments import run
from eulerchaos.io.logging import error, info, setup_logging


def run_experiment(args, kind : Kind):
  setup_logging(args.runtime.log_level, log_file=args.runtime.log_file)

  try:
    config = load_config(args.experiment.config)
    if config.kind != kind:
      raise ConfigError(f"{args.experiment.config} is a '{config.kind.name}' experiment, "
        f"not '{kind.name}'", key='kind')

    config = with_overrides(config, seed=args.experiment.seed, out=args.experiment.out,
      threads=args.runtime.threads, json=args.experiment.json or None)
    rows = run(config)

  except EulerChaosError as e:
    error(f"{kind.name}: {e}")
    sys.exit(1)

  info(f"Wrote {len(rows)} rows to {config.out}")
  return rows


@dataclass
class Simulate:
  """Euler simulation of one SDE, moments and Hölder ratio"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.simulate)


@dataclass
class Converge:
  """Strong and weak error of the Euler scheme against a fine reference"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.converge)


@dataclass
class Krylov:
  """Occupation ratios of discretized Itô processes against Lp norms"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.krylov)


@dataclass
class Chaos:
  """Particle systems against i.i.d. McKean-Vlasov copies over N and h"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.chaos)


@dataclass
class Meanfield:
  """Mean-field Euler pools and particle moment bounds"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.meanfield)


@dataclass
class Report:
  """Tabulate result CSVs and fit rates"""
  experiment : ExperimentOpts
  runtime : RuntimeOpts = field(default_factory=RuntimeOpts)

  def execute(self):
    return run_experiment(self, Kind.report)
