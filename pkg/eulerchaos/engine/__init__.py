from .euler import EulerPath, euler_step, simulate_euler, interpolate, interpolate_all
from .exact import exact_ou
from .ito import AdaptedCoefficientRule, DiscretizedItoPath, simulate_discretized_ito,\
  audit_trace, sample_aux, load_rule
