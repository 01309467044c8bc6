from dataclasses import dataclass
from typing import Union

from eulerchaos.app.experiment import Chaos, Converge, Krylov, Meanfield, Report, Simulate
from eulerchaos.config.arguments import run_with


@dataclass
class EulerChaos:
  """eulerchaos - Euler schemes with discontinuous coefficients
  - simulate: simulate one SDE and report moments
  - converge: strong/weak error against a fine reference
  - krylov: discretized Krylov ratios
  - chaos: propagation of chaos over particle counts and step sizes
  - meanfield: mean-field pools and particle moments
  - report: tabulate CSVs and fit rates
  """
  command : Union[Simulate, Converge, Krylov, Chaos, Meanfield, Report]

  def execute(self):
    return self.command.execute()


def cli(args=None):
  return run_with(EulerChaos, args)

if __name__ == '__main__':
  cli()
