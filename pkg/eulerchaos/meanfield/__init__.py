from .measure import EmpiricalMeasure, empirical, measure_moment, wasserstein
from .particles import InitialLaw, ParticleEnsemble, IidEnsemble, load_law,\
  simulate_particle_system, simulate_pool, simulate_mckean, stack_ensembles
