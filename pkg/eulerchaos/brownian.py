import hashlib
from multiprocessing import cpu_count

import numpy as np
from cached_property import cached_property

from .errors import InvalidArgument
from .reduce import block_sums
from .threading import parmap_list
from .timegrid import TimeGrid


class StreamKey(object):
  """ A master seed plus an ordered list of (tag, index) labels.

  The key is hashed into the state of a counter-based (Philox) generator, so
  the stream depends only on the key and never on scheduling order.
  """

  def __init__(self, master_seed, labels=()):
    if int(master_seed) != master_seed or not (0 <= master_seed < 2**64):
      raise InvalidArgument(f"StreamKey: master seed must be a 64-bit unsigned integer, got {master_seed}")

    self.master_seed = int(master_seed)
    self.labels = tuple((str(tag), int(index)) for tag, index in labels)

  def child(self, tag, index=0):
    return StreamKey(self.master_seed, self.labels + ((tag, index),))

  def children(self, tag, n):
    return [self.child(tag, i) for i in range(n)]

  def __eq__(self, other):
    return isinstance(other, StreamKey) and self.master_seed == other.master_seed\
      and self.labels == other.labels

  def __hash__(self):
    return hash((self.master_seed, self.labels))

  def __repr__(self):
    path = "/".join(f"{tag}:{index}" for tag, index in self.labels)
    return f"StreamKey({self.master_seed}, {path or '-'})"

  @cached_property
  def entropy(self):
    path = "/".join(f"{tag}:{index}" for tag, index in self.labels)
    digest = hashlib.sha256(f"{self.master_seed}|{path}".encode('utf-8')).digest()
    return [int.from_bytes(digest[i:i + 4], 'little') for i in range(0, len(digest), 4)]

  def generator(self):
    seq = np.random.SeedSequence(self.entropy)
    return np.random.Generator(np.random.Philox(seq))


class BrownianPath(object):
  """ Gaussian increments of a d-dimensional Brownian motion on a uniform grid.

  increments has shape (..., n, d), leading axes index independent replications.
  values (W at the nodes, W(0) = 0) is derived by a left-to-right cumulative
  sum unless supplied, which coarsening does so that shared nodes stay exact.
  keys records the stream key of each replication when known, paths derived
  from the same keys are coupled.
  """

  def __init__(self, grid : TimeGrid, increments, values=None, keys=None):
    increments = np.array(increments, dtype=np.float64)
    assert increments.ndim >= 2 and increments.shape[-2] == grid.n,\
      f"BrownianPath: expected increments (..., {grid.n}, d), got {increments.shape}"

    self.grid = grid
    self.increments = increments
    self.increments.flags.writeable = False
    self.keys = None if keys is None else tuple(keys)

    if values is not None:
      values = np.asarray(values, dtype=np.float64)
      assert values.shape[:-2] == increments.shape[:-2] and values.shape[-2] == grid.n + 1
      values.flags.writeable = False
      self.__dict__['cumulative'] = values

  @property
  def dim(self):
    return self.increments.shape[-1]

  @property
  def batch_shape(self):
    return self.increments.shape[:-2]

  def __len__(self):
    assert len(self.batch_shape) > 0, "BrownianPath: single path has no length"
    return self.batch_shape[0]

  def __getitem__(self, i):
    assert len(self.batch_shape) > 0, "BrownianPath: single path cannot be indexed"
    return BrownianPath(self.grid, self.increments[i], self.cumulative[i], index_keys(self.keys, i))

  @cached_property
  def cumulative(self):
    zero = np.zeros((*self.batch_shape, 1, self.dim))
    values = np.concatenate([zero, np.cumsum(self.increments, axis=-2)], axis=-2)
    values.flags.writeable = False
    return values

  def at(self, t):
    k = self.grid.node_index(t)
    if k is None:
      raise InvalidArgument(f"BrownianPath: t={t} is not a node of {self.grid}")
    return self.cumulative[..., k, :]


def index_keys(keys, i):
  if keys is None:
    return None
  if isinstance(i, (int, np.integer)):
    return (keys[i],)
  if isinstance(i, slice):
    return keys[i]
  return None


def sample_increments(grid, dim, key):
  return key.generator().standard_normal((grid.n, dim)) * np.sqrt(grid.h)


def sample_brownian(grid : TimeGrid, dim : int, key : StreamKey):
  if int(dim) != dim or dim < 1:
    raise InvalidArgument(f"sample_brownian: dim must be a positive integer, got {dim}")
  return BrownianPath(grid, sample_increments(grid, int(dim), key), keys=[key])


def sample_brownian_batch(grid, dim, keys, j=cpu_count(), progress=None):
  """ One path per key, stacked in key order into a (len(keys), n, d) batch """
  if int(dim) != dim or dim < 1:
    raise InvalidArgument(f"sample_brownian: dim must be a positive integer, got {dim}")

  def sample(key):
    return sample_increments(grid, int(dim), key)

  increments = parmap_list(sample, keys, j=j, chunksize=64, progress=progress)
  return BrownianPath(grid, np.stack(increments), keys=keys)


def coarsen(path : BrownianPath, factor : int):
  n = path.grid.n
  if int(factor) != factor or factor < 1 or n % factor != 0:
    raise InvalidArgument(f"coarsen: factor {factor} does not divide n={n}")
  if factor == 1:
    return path

  grid = TimeGrid(path.grid.T, n // int(factor))
  increments = block_sums(path.increments, int(factor))
  return BrownianPath(grid, increments, path.cumulative[..., ::int(factor), :], path.keys)
