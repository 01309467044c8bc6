from dataclasses import dataclass
from typing import Optional

from simple_parsing import ArgumentParser, choice


@dataclass
class ExperimentOpts:
  """ Experiment file and the values that override it """
  config: str                      # Experiment file (key = value lines)
  seed: Optional[int] = None       # Master seed, overrides the file
  out: Optional[str] = None        # Output CSV path, overrides the file
  json: bool = False               # Also write a JSON mirror of the rows


@dataclass
class RuntimeOpts:
  """ Miscellaneous runtime parameters """
  threads: Optional[int] = None   # Number of worker threads (default cpu count - 1), never changes results
  log_level: str = choice('INFO', 'DEBUG', 'WARN', default='INFO') # Minimum log level
  log_file: Optional[str] = None  # Append the log to a file as well


def run_with(command_type, args=None):
  parser = ArgumentParser(prog='eulerchaos')
  parser.add_arguments(command_type, dest="app")

  program = parser.parse_args(args)
  return program.app.execute()
