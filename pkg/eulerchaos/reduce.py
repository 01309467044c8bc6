""" Fixed-order reductions.

Every sum here runs in ascending index order. The kernels release the GIL so
thread pools can run them concurrently, results do not depend on how many
threads there are.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _block_sums(values, factor):
  r, n, d = values.shape
  m = n // factor
  out = np.zeros((r, m, d))

  for i in range(r):
    for k in range(m):
      for c in range(d):
        acc = 0.0
        for j in range(k * factor, (k + 1) * factor):
          acc += values[i, j, c]
        out[i, k, c] = acc
  return out


@njit(cache=True, nogil=True)
def _ordered_sum(values):
  n, m, k = values.shape
  out = np.zeros((n, k))

  for j in range(n):
    for c in range(k):
      acc = 0.0
      for i in range(m):
        acc += values[j, i, c]
      out[j, c] = acc
  return out


@njit(cache=True, nogil=True)
def _ordered_weighted_sum(values, weights):
  n, m, k = values.shape
  out = np.zeros((n, k))

  for j in range(n):
    for c in range(k):
      acc = 0.0
      for i in range(m):
        acc += weights[i] * values[j, i, c]
      out[j, c] = acc
  return out


def block_sums(values, factor):
  """ Sum consecutive blocks of `factor` entries along axis -2, left to right.
  values: (..., n, d)
  """
  values = np.asarray(values, dtype=np.float64)
  prefix, (n, d) = values.shape[:-2], values.shape[-2:]
  assert n % factor == 0, f"block_sums: {factor} does not divide {n}"

  flat = np.ascontiguousarray(values.reshape(-1, n, d))
  return _block_sums(flat, factor).reshape(*prefix, n // factor, d)


def ordered_mean(values, weights=None):
  """ Average over axis 1 of (n, m, ...) pairwise evaluations, summing
  atoms i = 0..m-1 in ascending order for each row. Uniform weights divide
  the plain sum by m, other weights are applied term by term.
  """
  values = np.asarray(values, dtype=np.float64)
  n, m, *rest = values.shape
  flat = np.ascontiguousarray(values.reshape(n, m, -1))

  if weights is None:
    return (_ordered_sum(flat) / m).reshape(n, *rest)

  weights = np.ascontiguousarray(weights, dtype=np.float64)
  assert weights.shape == (m,), f"ordered_mean: expected {m} weights, got {weights.shape}"
  return _ordered_weighted_sum(flat, weights).reshape(n, *rest)
