import pytest

from eulerchaos.config import Embedding, Kind, load_config, params_of, parse_config, with_overrides
from eulerchaos.errors import ConfigError


minimal = """
kind = simulate
model = ou
T = 1.0
n = 64
replications = 200
seed = 7
out = results.csv
"""


def test_minimal_simulate():
  config = parse_config(minimal)
  assert config.kind == Kind.simulate
  assert config.model == "ou" and config.n == 64 and config.replications == 200
  assert config.seed == 7 and config.out == "results.csv"
  assert config.embedding == Embedding.floor


def test_sweep_and_params():
  config = parse_config("""
    kind = converge   # self-convergence
    model = ou
    model_params = theta:2, sigma: 0.5
    n_sweep = 16,32,64
    embedding = interpolate
    seed = 1
    out = converge.csv
  """)
  assert config.n_sweep == [16, 32, 64]
  assert config.embedding == Embedding.interpolate
  assert params_of(config, 'model') == {'theta': '2', 'sigma': '0.5'}


def test_unknown_kind():
  with pytest.raises(ConfigError) as e:
    parse_config(minimal.replace("kind = simulate", "kind = frobnicate"))
  assert e.value.key == 'kind' and e.value.line == 2


def test_unknown_key():
  with pytest.raises(ConfigError) as e:
    parse_config(minimal + "colour = blue\n")
  assert e.value.key == 'colour'
  assert "colour" in str(e.value)


def test_malformed_number():
  with pytest.raises(ConfigError) as e:
    parse_config(minimal.replace("n = 64", "n = sixty"))
  assert e.value.key == 'n' and e.value.line == 5


@pytest.mark.parametrize("key", ["seed", "out", "kind"])
def test_missing_required(key):
  text = "\n".join(line for line in minimal.splitlines() if not line.startswith(key))
  with pytest.raises(ConfigError) as e:
    parse_config(text)
  assert e.value.key == key


def test_missing_kind_specific_key():
  with pytest.raises(ConfigError) as e:
    parse_config("kind = converge\nmodel = ou\nseed = 1\nout = x.csv\n")
  assert e.value.key == 'n_sweep'


def test_unknown_model():
  with pytest.raises(ConfigError) as e:
    parse_config(minimal.replace("model = ou", "model = frobnicate"))
  assert e.value.key == 'model' and e.value.line == 3


def test_duplicate_key():
  with pytest.raises(ConfigError) as e:
    parse_config(minimal + "n = 32\n")
  assert e.value.key == 'n'


def test_invalid_values():
  with pytest.raises(ConfigError):
    parse_config(minimal.replace("n = 64", "n = 0"))
  with pytest.raises(ConfigError):
    parse_config(minimal.replace("seed = 7", "seed = -1"))
  with pytest.raises(ConfigError):
    parse_config(minimal + "x0 = 1, 2, 3\n")
  with pytest.raises(ConfigError):
    parse_config(minimal + "model_params = theta\n")
  with pytest.raises(ConfigError):
    parse_config(minimal.replace("kind = simulate", "kind = converge") + "n_sweep = 16, 0\n")
  with pytest.raises(ConfigError):
    parse_config(minimal + "no equals sign\n")


def test_kernel_names():
  text = "kind = chaos\nkernel = mean_field_ou\nparticles_sweep = 8, 16\nseed = 1\nout = c.csv\n"
  assert parse_config(text).kernel == "mean_field_ou"

  with pytest.raises(ConfigError):
    parse_config(text.replace("mean_field_ou", "ou"))


def test_load_config(tmp_path):
  filename = tmp_path / "simulate.cfg"
  filename.write_text(minimal, encoding='utf-8')
  assert load_config(str(filename)).n == 64

  with pytest.raises(ConfigError):
    load_config(str(tmp_path / "missing.cfg"))


def test_load_config_rejects_invalid_utf8(tmp_path):
  filename = tmp_path / "binary.cfg"
  filename.write_bytes(b"kind = simulate\nmodel = \xff\n")

  with pytest.raises(ConfigError) as e:
    load_config(str(filename))
  assert "0xff" in str(e.value)


def test_overrides():
  config = with_overrides(parse_config(minimal), seed=11, out="other.csv", threads=3)
  assert config.seed == 11 and config.out == "other.csv" and config.threads == 3
  assert not config.json

  config = with_overrides(parse_config(minimal), json=True)
  assert config.seed == 7 and config.json
