import csv
import json
from dataclasses import asdict, dataclass, fields
from os import path
from typing import Optional

from eulerchaos.errors import InvalidArgument
from .logging import info


@dataclass
class ResultRow:
  """ One measured quantity with the coordinates of the sweep point it belongs to """
  experiment_id: str
  kind: str
  model: str
  metric: str
  value: float
  seed: int
  h: Optional[float] = None
  n_steps: Optional[int] = None
  n_particles: Optional[int] = None
  p: Optional[float] = None
  beta: Optional[float] = None
  stderr: Optional[float] = None
  replications: Optional[int] = None
  wall_ms: Optional[float] = None


header = ['experiment_id', 'kind', 'model', 'h', 'n_steps', 'n_particles', 'p', 'beta',
  'metric', 'value', 'stderr', 'replications', 'seed', 'wall_ms']

assert sorted(header) == sorted(f.name for f in fields(ResultRow))

integer_columns = {'n_steps', 'n_particles', 'replications', 'seed'}
text_columns = {'experiment_id', 'kind', 'model', 'metric'}


def format_value(v):
  if v is None:
    return ''
  if isinstance(v, float):
    return repr(float(v))
  return str(v)


def write_csv(rows, filename):
  with open(filename, 'w', newline='', encoding='utf-8') as f:
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
      d = asdict(row)
      writer.writerow([format_value(d[k]) for k in header])

  info(f"Wrote {len(rows)} rows to {filename}")


def json_filename(filename):
  base, _ = path.splitext(filename)
  return base + ".json"


def write_json(rows, filename):
  with open(filename, 'w', encoding='utf-8') as f:
    json.dump([{k: asdict(row)[k] for k in header} for row in rows], f, indent=2)

  info(f"Wrote {len(rows)} rows to {filename}")


def parse_value(k, v):
  if k in text_columns:
    return v
  if v == '':
    return None
  return int(v) if k in integer_columns else float(v)


def read_csv(filename):
  if not path.isfile(filename):
    raise InvalidArgument(f"result file {filename} not found")

  with open(filename, newline='', encoding='utf-8') as f:
    reader = csv.DictReader(f)
    if reader.fieldnames != header:
      raise InvalidArgument(f"{filename}: unexpected header {reader.fieldnames}")
    return [ResultRow(**{k: parse_value(k, v) for k, v in record.items()}) for record in reader]
