import pytest

from telab.errors import ConditionHViolated, ConfigError, RegionError, SectorViolation
from telab.models.run_config import load_run_config, parse_run_config, segment_from


def test_defaults(config_text):
    config = parse_run_config(config_text("verify"))
    assert config.command == "verify"
    assert config.grid_size == 64
    assert [str(m) for m in config.modes] == ["TE1", "TM1", "TE2", "TM2", "TE3", "TM3"]
    assert abs(config.spectral.k) == pytest.approx(10.0)
    assert config.region is None
    assert config.output_dir is None
    assert config.media_validated


def test_scan_gets_default_region(config_text):
    config = parse_run_config(config_text("scan"))
    rect = config.region.rectangle
    assert (rect.re_min, rect.re_max, rect.im_min, rect.im_max) == (-20.0, 20.0, -20.0, 20.0)


def test_dispersion_has_no_region(config_text):
    config = parse_run_config(config_text("dispersion", re_min=0.5, re_max=4))
    assert config.region is None
    assert segment_from(config) == (0.5 + 0j, 4.0 + 0j)


def test_default_segment(config_text):
    config = parse_run_config(config_text("dispersion"))
    assert segment_from(config) == (0.1 + 0j, 10.0 + 0j)


def test_lists_are_comma_separated(config_text):
    config = parse_run_config(config_text("verify", k_magnitudes="10, 20,40", polarizations="TE"))
    assert config.k_magnitudes == [10.0, 20.0, 40.0]
    assert [str(m) for m in config.modes] == ["TE1", "TE2", "TE3"]


def test_seed_override(config_text):
    config = parse_run_config(config_text("verify", seed=3), seed=11)
    assert config.seed == 11
    assert config.echo["seed"] == 11


def test_unknown_key_has_line(config_text):
    with pytest.raises(ConfigError) as exc:
        parse_run_config(config_text("verify", colour="blue"))
    assert exc.value.key == "colour"
    assert exc.value.line is not None
    assert exc.value.exit_code == 2


def test_duplicate_key():
    with pytest.raises(ConfigError) as exc:
        parse_run_config("eps = 1\neps = 2\n")
    assert exc.value.line == 2


def test_invalid_value(config_text):
    with pytest.raises(ConfigError) as exc:
        parse_run_config(config_text("verify", grid_size="many"))
    assert exc.value.key == "grid_size"


def test_n_max_below_n_min(config_text):
    with pytest.raises(ConfigError):
        parse_run_config(config_text("verify", n_min=3, n_max=2))


def test_condition_h_reported_with_key():
    text = "eps = 1\nmu = 1\neps_hat = 2\nmu_hat = 2\n"
    with pytest.raises(ConditionHViolated) as exc:
        parse_run_config(text)
    assert exc.value.details["line"] == 1


def test_degenerate_media_allowed_without_validation():
    config = parse_run_config("eps = 1\nmu = 1\neps_hat = 2\nmu_hat = 2\nvalidate = false\n")
    assert not config.media_validated


def test_sector_violation_surfaces(config_text):
    with pytest.raises(SectorViolation) as exc:
        parse_run_config(config_text("verify", k_arg_degrees=10))
    assert exc.value.details["key"] == "k_arg_degrees"


def test_empty_region_rejected(config_text):
    with pytest.raises(RegionError):
        parse_run_config(config_text("scan", re_min=1, re_max=1))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.conf")


def test_load_from_file(tmp_path, config_text):
    path = tmp_path / "run.conf"
    path.write_text(config_text("count", t_max=3), encoding="utf-8")
    config = load_run_config(path).with_output(tmp_path / "out")
    assert config.t_max == 3.0
    assert config.output_dir == tmp_path / "out"
