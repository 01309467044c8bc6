from collections import defaultdict

from .logging import info


def coordinates(row):
  parts = [f"{k}={getattr(row, k):g}" for k in ['h', 'p', 'beta'] if getattr(row, k) is not None]
  parts += [f"{k}={getattr(row, k)}" for k in ['n_steps', 'n_particles'] if getattr(row, k) is not None]
  return " ".join(parts)


def report_rows(rows):
  """ Log a table of values per (model, metric) """
  groups = defaultdict(list)
  for row in rows:
    groups[(row.model, row.metric)].append(row)

  for (model, metric), group in groups.items():
    info(f"{model} {metric}:")
    for row in group:
      stderr = "" if row.stderr is None else f" ± {row.stderr:.3g}"
      info(f"  {coordinates(row):40s} {row.value:.6g}{stderr}")

