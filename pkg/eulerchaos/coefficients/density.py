import numpy as np
from scipy.special import gammaln

from eulerchaos.errors import InvalidArgument


def gaussian_density(t, y, d=None):
  """ φ_t(y) = (2πt)^(-d/2) exp(-|y|²/(2t)), the density of W_t.
  y: points (..., d), or a scalar / (d,) point when d is given.
  """
  if not (np.isfinite(t) and t > 0):
    raise InvalidArgument(f"gaussian_density: t must be positive, got {t}")

  y = np.asarray(y, dtype=np.float64)
  if d is None:
    y = np.atleast_1d(y)
    d = y.shape[-1]
  elif y.ndim == 0:
    y = np.full(d, float(y))

  assert y.shape[-1] == d, f"gaussian_density: expected points of dimension {d}, got {y.shape}"
  sq = np.sum(y * y, axis=-1)
  return (2 * np.pi * t) ** (-d / 2) * np.exp(-sq / (2 * t))


def ball_volume(r, d):
  """ Lebesgue measure of the radius r ball in R^d """
  return float(np.exp(0.5 * d * np.log(np.pi) + d * np.log(r) - gammaln(0.5 * d + 1)))
