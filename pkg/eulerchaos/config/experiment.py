""" Flat key = value experiment files, parsed into an omegaconf structured config.

  kind = converge       # experiment kind
  model = ou
  model_params = theta:1, sigma:1
  n_sweep = 16, 32, 64
"""
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import List, Optional

from omegaconf import MISSING, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from eulerchaos.coefficients.catalog import kernels, measure_coefficients, models
from eulerchaos.diagnostics import test_functions
from eulerchaos.engine.ito import rules
from eulerchaos.errors import ConfigError
from eulerchaos.meanfield.particles import laws


class Kind(Enum):
  simulate = 0
  converge = 1
  krylov = 2
  chaos = 3
  meanfield = 4
  report = 5


class Embedding(Enum):
  floor = 0
  interpolate = 1
  nodes = 2


@dataclass
class ExperimentConfig:
  kind: Kind = MISSING
  seed: int = MISSING
  out: str = MISSING
  experiment_id: Optional[str] = None

  model: str = "ou"
  model_params: List[str] = field(default_factory=list)
  kernel: str = "mean"
  kernel_params: List[str] = field(default_factory=list)
  rule: str = "sin_switch"
  rule_params: List[str] = field(default_factory=list)
  law: str = "dirac"
  law_params: List[str] = field(default_factory=list)
  weak_continuity_assumed: bool = False

  dim: int = 1
  x0: List[float] = field(default_factory=lambda: [1.0])
  T: float = 1.0
  n: int = 32
  n_sweep: List[int] = field(default_factory=list)
  ref_factor: int = 16
  embedding: Embedding = Embedding.floor
  test_function: str = "halfspace"

  replications: int = 1000
  particles: int = 64
  particles_sweep: List[int] = field(default_factory=list)
  tracked: int = 32
  pool: int = 4096

  beta: float = 4.0
  p: float = 3.0
  radius_sweep: List[float] = field(default_factory=lambda: [1.0, 0.5, 0.25, 0.125])
  steps_sweep: List[int] = field(default_factory=lambda: [16, 64, 256, 1024])

  mollifier_eps: float = 0.1
  mollifier_nodes: int = 9

  inputs: List[str] = field(default_factory=list)
  json: bool = False
  threads: Optional[int] = None


list_keys = {f.name for f in fields(ExperimentConfig) if getattr(f.type, '__origin__', None) is list}
config_keys = {f.name for f in fields(ExperimentConfig)}

# Keys that must appear in the file, beyond the MISSING ones
required_keys = {
  Kind.simulate: ['model', 'n'],
  Kind.converge: ['model', 'n_sweep'],
  Kind.krylov: ['rule', 'steps_sweep'],
  Kind.chaos: ['kernel', 'particles_sweep'],
  Kind.meanfield: ['kernel'],
  Kind.report: ['inputs']
}

catalogs = dict(
  model=models,
  kernel={**kernels, **measure_coefficients},
  rule=rules,
  law=laws,
  test_function=test_functions
)

positive_keys = ['dim', 'n', 'ref_factor', 'replications', 'particles', 'tracked', 'pool',
  'mollifier_nodes', 'T', 'mollifier_eps']


def split_line(line, line_number):
  text = line.split('#', 1)[0].strip()
  if len(text) == 0:
    return None

  if '=' not in text:
    raise ConfigError(f"expected 'key = value', got '{text}'", line=line_number)

  key, value = [s.strip() for s in text.split('=', 1)]
  if key not in config_keys:
    raise ConfigError(f"unknown key '{key}', valid keys are ({', '.join(sorted(config_keys))})",
      key=key, line=line_number)
  return key, value


def assign(conf, key, value, line_number):
  if key in list_keys:
    value = [v.strip() for v in value.split(',') if len(v.strip()) > 0]

  try:
    conf[key] = value
  except OmegaConfBaseException as e:
    raise ConfigError(f"bad value for '{key}': {e.msg or e}", key=key, line=line_number) from e


def parse_params(entries, key, line=None):
  """ ['theta:1', 'sigma:0.5'] -> {'theta': '1', 'sigma': '0.5'} """
  params = {}
  for entry in entries:
    if ':' not in entry:
      raise ConfigError(f"expected name:value in '{key}', got '{entry}'", key=key, line=line)
    name, value = [s.strip() for s in entry.split(':', 1)]
    params[name] = value
  return params


def validate(config, lines, present):
  for key in required_keys[config.kind]:
    if key not in present:
      raise ConfigError(f"missing required key '{key}' for kind {config.kind.name}", key=key)

  for key, table in catalogs.items():
    name = getattr(config, key)
    if name not in table:
      raise ConfigError(f"unknown {key} '{name}', options are ({' | '.join(table.keys())})",
        key=key, line=lines.get(key))

  for key in positive_keys:
    if not getattr(config, key) > 0:
      raise ConfigError(f"'{key}' must be positive", key=key, line=lines.get(key))

  for key in ['n_sweep', 'particles_sweep', 'steps_sweep', 'radius_sweep']:
    if key in present and len(getattr(config, key)) == 0:
      raise ConfigError(f"sweep '{key}' is empty", key=key, line=lines.get(key))
    if any(not v > 0 for v in getattr(config, key)):
      raise ConfigError(f"sweep '{key}' has nonpositive entries", key=key, line=lines.get(key))

  if len(config.x0) not in (1, config.dim):
    raise ConfigError(f"x0 has {len(config.x0)} entries for dim={config.dim}", key='x0', line=lines.get('x0'))

  for key in ['model_params', 'kernel_params', 'rule_params', 'law_params']:
    parse_params(getattr(config, key), key, lines.get(key))


def parse_config(text : str) -> ExperimentConfig:
  conf = OmegaConf.structured(ExperimentConfig)
  lines = {}

  for line_number, line in enumerate(text.splitlines(), 1):
    entry = split_line(line, line_number)
    if entry is None:
      continue

    key, value = entry
    if key in lines:
      raise ConfigError(f"duplicate key '{key}' (first set on line {lines[key]})", key=key, line=line_number)

    assign(conf, key, value, line_number)
    lines[key] = line_number

  for key in ['kind', 'seed', 'out']:
    if OmegaConf.is_missing(conf, key):
      raise ConfigError(f"missing required key '{key}'", key=key)

  config = OmegaConf.to_object(conf)
  if not 0 <= config.seed < 2**64:
    raise ConfigError(f"seed must be a 64-bit unsigned integer, got {config.seed}", key='seed', line=lines['seed'])

  validate(config, lines, set(lines))
  return config


def load_config(filename) -> ExperimentConfig:
  try:
    with open(filename, encoding='utf-8') as f:
      text = f.read()
  except OSError as e:
    raise ConfigError(f"cannot read {filename}: {e.strerror}") from e
  except UnicodeDecodeError as e:
    raise ConfigError(f"{filename} is not UTF-8 text: byte {e.object[e.start]:#04x} at offset {e.start}") from e
  return parse_config(text)


def params_of(config : ExperimentConfig, key):
  return parse_params(getattr(config, f"{key}_params"), f"{key}_params")


def with_overrides(config : ExperimentConfig, seed=None, out=None, threads=None, json=None):
  """ Command line values take precedence over the file """
  overrides = dict(seed=seed, out=out, threads=threads, json=json)
  for k, v in overrides.items():
    if v is not None:
      setattr(config, k, v)
  return config
