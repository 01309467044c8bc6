from . import eulerchaos, experiment
