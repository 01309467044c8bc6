import numpy as np
from cached_property import cached_property

from .errors import InvalidArgument, OutOfRange


class TimeGrid(object):
  """ Uniform partition of [0, T] into n steps of size h = T/n """

  def __init__(self, T, n):
    self.T = float(T)
    self.n = int(n)
    self.h = self.T / self.n

  def __repr__(self):
    return f"TimeGrid(T={self.T}, n={self.n}, h={self.h:.6g})"

  def __eq__(self, other):
    return isinstance(other, TimeGrid) and self.T == other.T and self.n == other.n

  def __hash__(self):
    return hash((self.T, self.n))

  def node(self, k):
    if k == self.n:
      return self.T
    return k * self.h

  @cached_property
  def nodes(self):
    nodes = np.arange(self.n + 1) * self.h
    nodes[-1] = self.T
    return nodes

  def refine(self, factor):
    return TimeGrid(self.T, self.n * factor)

  def divides(self, other):
    """ True if every node of this grid is a node of the (finer) other grid """
    return self.T == other.T and other.n % self.n == 0

  def floor_index(self, t):
    if not (0 <= t <= self.T):
      raise OutOfRange(f"t={t} outside [0, {self.T}]")
    if t == self.T:
      return self.n

    k = int(np.floor(t / self.h))
    # t/h may round up across a node
    if k > 0 and k * self.h > t:
      k -= 1
    return min(k, self.n)

  def floor_time(self, t):
    return self.node(self.floor_index(t))

  def node_index(self, t, tol=1e-9):
    """ Index k with node(k) == t (up to tol * h), or None """
    k = int(np.rint(t / self.h))
    if 0 <= k <= self.n and abs(self.node(k) - t) <= tol * self.h:
      return k
    return None


def make_grid(T, n):
  if not (np.isfinite(T) and T > 0):
    raise InvalidArgument(f"make_grid: horizon T must be positive, got {T}")
  if int(n) != n or n < 1:
    raise InvalidArgument(f"make_grid: steps n must be a positive integer, got {n}")
  return TimeGrid(T, int(n))


def floor_time(grid, t):
  return grid.floor_time(t)
