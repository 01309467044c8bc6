import logging

from eulerchaos.config import parse_config
from eulerchaos.io.logging import IndentFormatter
from eulerchaos.io.pprint import pformat, pformat_config


def test_indent_formatter_indents_continuation_lines():
  formatter = IndentFormatter('%(levelname)s - %(message)s')
  record = logging.LogRecord("eulerchaos", logging.INFO, __file__, 1, "first\nsecond %d", (2,), None)

  assert formatter.format(record) == "INFO - first\n       second 2"


def test_pformat_floats_and_enums():
  config = parse_config("kind = converge\nseed = 3\nout = x.csv\nmodel = ou\nn_sweep = 4, 8\n")
  text = pformat_config(config)

  assert "'kind': converge" in text
  assert "'experiment_id'" not in text
  assert pformat(1 / 3) == "0.333333"
