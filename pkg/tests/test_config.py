import pytest

from escapelab import ParamError
from escapelab.config import load_config, model_params_from_config, parse_config_text

GOOD = """
# experiment point
alpha = 1.0
f = 0.8
k = 1
kstar = 1
V = 1e6     # desk scale
q = 4
m = 0.6
seed = 42
epsilon = 0.01
"""


def test_parse_and_build():
    cfg = parse_config_text(GOOD)
    assert cfg["seed"] == 42 and cfg["V"] == 1e6
    mp = model_params_from_config(cfg)
    assert mp.epsilon == 0.01 and mp.scaling_mode == "epsilon"


def test_unknown_key_rejected():
    with pytest.raises(ParamError):
        parse_config_text("alpha = 1\nbogus = 2\n")


def test_missing_mode_rejected():
    cfg = parse_config_text("alpha = 1\nf = 0.8\n")
    with pytest.raises(ParamError):
        model_params_from_config(cfg)


def test_two_modes_rejected():
    cfg = parse_config_text("alpha = 1\nf = 0.8\nepsilon = 0.01\nbeta = 0.3\n")
    with pytest.raises(ParamError):
        model_params_from_config(cfg)


def test_override_wins():
    cfg = parse_config_text(GOOD)
    mp = model_params_from_config(cfg, f=0.7)
    assert mp.f == 0.7


def test_file_round_trip(tmp_path):
    p = tmp_path / "lab.cfg"
    p.write_text(GOOD)
    assert load_config(str(p))["alpha"] == 1.0


def test_kappa_mode_from_config():
    cfg = parse_config_text("alpha = 1\nf = 0.8\nkappa = 0.5\nV = 1e6\n")
    mp = model_params_from_config(cfg)
    assert mp.scaling_mode == "kappa" and mp.epsilon > 0
