import pprint as pp
from dataclasses import asdict
from enum import Enum

import numpy as np


class FormatPrinter(pp.PrettyPrinter):
  """ PrettyPrinter with per-type format strings, first match wins """

  def __init__(self, formats):
    super(FormatPrinter, self).__init__(sort_dicts=False)
    self.formats = formats

  def format(self, obj, ctx, maxlvl, lvl):
    for t, format in self.formats:
      if isinstance(obj, t):
        return format(obj), 1, 0
    return pp.PrettyPrinter.format(self, obj, ctx, maxlvl, lvl)


formatter = FormatPrinter(
  formats=[
    ((np.floating, float), "{:.6g}".format),
    (Enum, lambda e: e.name),
    (np.ndarray, lambda a: np.array2string(a, separator=', '))
  ])


def pformat(x, *args, **kwargs):
  return formatter.pformat(x, *args, **kwargs)


def pformat_config(config):
  """ Experiment config without unset optional keys """
  return pformat({k: v for k, v in asdict(config).items() if v is not None and v != []})
