import math

import pytest

from ricianlp.config import RunConfig
from ricianlp.errors import ConfigError
from ricianlp.signaling import Regime


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_defaults():
    cfg = RunConfig.load(env={})
    assert cfg.regime() is Regime.FOURTH_MOMENT
    assert cfg.constraint.kappa == 2.0
    grid = cfg.snr_grid()
    assert grid.size == 201 and grid[0] == pytest.approx(10.0)
    ch = cfg.channel_params()
    assert ch.rician_factor == pytest.approx(1.0) and ch.gain == pytest.approx(1.0)
    opt = cfg.optimizer_config()
    assert opt.max_points == 6 and opt.seed == 0


def test_file_values(tmp_path):
    path = write(tmp_path, "[channel]\nrician_k = 2\nnormalized = no\n[constraint]\nregime = par\nkappa = 3\n"
                 "[optimizer]\nmax_points = 10\n[run]\nseed = 7\n")
    cfg = RunConfig.load(path, env={})
    assert cfg.channel.normalized is False
    ch = cfg.channel_params()
    assert ch.m_sq == pytest.approx(2.0) and ch.gamma_sq == 1.0
    assert cfg.constraint_set().regime is Regime.PEAK_TO_AVERAGE
    assert cfg.optimizer_config().max_points == 10
    assert cfg.optimizer_config().seed == 7


def test_explicit_line_of_sight(tmp_path):
    path = write(tmp_path, "[channel]\nm_real = 0.6\nm_imag = -0.8\ngamma_sq = 0.5\n")
    ch = RunConfig.load(path, env={}).channel_params()
    assert ch.m == complex(0.6, -0.8) and ch.gamma_sq == 0.5


def test_environment_overrides_file(tmp_path):
    path = write(tmp_path, "[constraint]\nkappa = 3\n")
    cfg = RunConfig.load(path, env={"RICIANLP_CONSTRAINT_KAPPA": "5", "RICIANLP_DISABLE_NUMBA": "1", "HOME": "/x"})
    assert cfg.constraint.kappa == 5.0


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[channel]\nrician_k = 1\nbogus = 2\n", "run.ini:3: unknown key 'bogus'"),
        ("[nope]\nx = 1\n", "unknown section [nope]"),
        ("[grid]\npoints_per_decade = many\n", "run.ini:2: bad value for [grid] points_per_decade"),
        ("[channel]\nnormalized = maybe\n", "not a boolean"),
        ("[channel]\nrician_k = 1\nrician_k = 2\n", "run.ini"),
        ("no section here\n", "run.ini"),
    ],
)
def test_file_errors(tmp_path, text, needle):
    path = write(tmp_path, text)
    with pytest.raises(ConfigError) as err:
        RunConfig.load(path, env={})
    assert needle in str(err.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        RunConfig.load(str(tmp_path / "absent.ini"), env={})


def test_unknown_environment_variable():
    with pytest.raises(ConfigError, match="RICIANLP_GRID_STEP"):
        RunConfig.load(env={"RICIANLP_GRID_STEP": "1"})
    with pytest.raises(ConfigError, match="RICIANLP_WHATEVER"):
        RunConfig.load(env={"RICIANLP_WHATEVER": "1"})


@pytest.mark.parametrize(
    "section, key, value",
    [("grid", "snr_min", "0"), ("grid", "snr_min", "20"), ("grid", "points_per_decade", "0"), ("grid", "snr_max", "inf")],
)
def test_invalid_grid(section, key, value):
    cfg = RunConfig()
    cfg.set_value(section, key, value)
    with pytest.raises(ConfigError, match="empty or invalid SNR grid"):
        cfg.snr_grid()


@pytest.mark.parametrize(
    "section, key, value, method",
    [
        ("constraint", "regime", "peakish", "regime"),
        ("constraint", "kappa", "0.5", "constraint_set"),
        ("channel", "rician_k", "-1", "channel_params"),
        ("optimizer", "max_points", "1", "optimizer_config"),
        ("quadrature", "order", "0", "quadrature_spec"),
    ],
)
def test_invalid_values_become_config_errors(section, key, value, method):
    cfg = RunConfig()
    cfg.set_value(section, key, value)
    with pytest.raises(ConfigError):
        getattr(cfg, method)()


def test_optional_fields_accept_none():
    cfg = RunConfig()
    cfg.set_value("signal", "p", "0.25")
    assert cfg.signal.p == 0.25
    cfg.set_value("signal", "p", "none")
    assert cfg.signal.p is None


def test_digest_ignores_output_directory():
    a, b = RunConfig(), RunConfig()
    b.run.out = "/elsewhere"
    assert a.digest() == b.digest()
    b.run.seed = 1
    assert a.digest() != b.digest()
    assert len(a.digest()) == 64 and not math.isnan(a.as_dict()["grid"]["snr_min"])
