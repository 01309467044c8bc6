import logging
import textwrap

from copy import copy
from sys import stdout

import numpy as np
from tqdm import tqdm

logger = logging.getLogger("eulerchaos")

def info(msg, *args, **kwargs):
  return logger.info(msg, *args, **kwargs)

def debug(msg, *args, **kwargs):
  return logger.debug(msg, *args, **kwargs)

def warning(msg, *args, **kwargs):
  return logger.warning(msg, *args, **kwargs)

def error(msg, *args, **kwargs):
  return logger.error(msg, *args, **kwargs)


class IndentFormatter(logging.Formatter):
  """ Multi-line messages (arrays, configs) are indented under the header """

  def format(self, record):
    message = record.getMessage()
    record = copy(record)
    record.msg = ''
    record.args = None

    header = super(IndentFormatter, self).format(record)
    return header + textwrap.indent(message, ' ' * len(header)).strip()


class ProgressHandler(logging.StreamHandler):
  """ Writes through tqdm so log lines land above any active progress bar """

  def emit(self, record):
    try:
      tqdm.write(self.format(record), file=self.stream)
    except RecursionError:
      raise
    except Exception:
      self.handleError(record)


def log_sweep_point(coords, elapsed_ms=None):
  point = " ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in coords.items())
  suffix = "" if elapsed_ms is None else f" ({elapsed_ms:.0f} ms)"
  debug(f"sweep point {point}{suffix}")


def setup_logging(console_level='INFO', handlers=[], log_file=None):
  np.set_printoptions(precision=6, suppress=True)
  formatter = IndentFormatter('%(levelname)s - %(message)s')

  for handler in list(logger.handlers):
    logger.removeHandler(handler)
    handler.close()

  for handler in handlers:
    logger.addHandler(handler)

  stream_handler = ProgressHandler(stream=stdout)
  stream_handler.setLevel(getattr(logging, console_level))
  stream_handler.setFormatter(formatter)
  logger.addHandler(stream_handler)

  if log_file is not None:
    file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)

    info(f"Logging to {log_file}")
    logger.addHandler(file_handler)

  logger.setLevel(logging.DEBUG)
  logger.propagate = False
