from multiprocessing import cpu_count
from multiprocessing.pool import ThreadPool
import traceback

from tqdm import tqdm

from .io.logging import error


class LogExceptions(object):
    def __init__(self, callable):
        self.__callable = callable

    def __call__(self, *args, **kwargs):
        try:
            result = self.__callable(*args, **kwargs)

        except Exception:
            # Workers swallow tracebacks, log it here before re-raising
            error(traceback.format_exc())
            raise

        return result


def parmap_list(f, xs, j=cpu_count(), chunksize=1, pool=ThreadPool, progress=tqdm):
  """ Order-preserving parallel map, runs inline for j <= 1 """
  xs = list(xs)

  if j is None or j <= 1 or len(xs) <= 1:
    iter = map(f, xs)
    if progress is not None:
      iter = progress(iter, total=len(xs), leave=False)
    return list(iter)

  with pool(processes=j) as workers:
    iter = workers.imap(LogExceptions(f), xs, chunksize=chunksize)

    if progress is not None:
      iter = progress(iter, total=len(xs), leave=False)

    return list(iter)


def chunk_ranges(n, chunks):
  """ Split range(n) into at most `chunks` contiguous (start, stop) pieces """
  chunks = max(1, min(n, chunks))
  bounds = [(n * i) // chunks for i in range(chunks + 1)]
  return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
