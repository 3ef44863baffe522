"""INI-файлы запусков и приоритет источников конфигурации"""
import pytest

from nonuniform_sobolev.exceptions import ConfigError
from nonuniform_sobolev.schemas.run_config import HeatConfig, NormConfig, SchrodingerConfig
from nonuniform_sobolev.utils.config_file import (
    load_ini,
    merge_sections,
    parse_times,
    resolve_global,
    validate_section,
)


@pytest.mark.unit
class TestLoadIni:
    def test_sections_keep_key_case(self, write_ini):
        path = write_ini("[heat]\ns = 1\nT_list = 1, 2\n\n[global]\nseed = 7\n")
        sections = load_ini(path)
        assert sections == {"heat": {"s": "1", "T_list": "1, 2"}, "global": {"seed": "7"}}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            load_ini(tmp_path / "absent.ini")
        assert exc.value.field == "config"

    def test_malformed_file(self, write_ini):
        with pytest.raises(ConfigError) as exc:
            load_ini(write_ini("s = 1\n"))
        assert exc.value.field == "config"


@pytest.mark.unit
class TestParseTimes:
    def test_geometric(self):
        times = parse_times("geom:0.01:100:5")
        assert times[0] == 0.01
        assert times[-1] == 100.0
        assert times[2] == pytest.approx(1.0)

    def test_list(self):
        assert parse_times("0, 0.5, 2") == [0.0, 0.5, 2.0]

    @pytest.mark.parametrize("text", ["geom:1:2", "geom:1:1:4", "geom:a:b:3", "0.1, x", " , "])
    def test_invalid(self, text):
        with pytest.raises(ConfigError) as exc:
            parse_times(text, "heat.times")
        assert exc.value.field == "heat.times"


@pytest.mark.unit
class TestValidateSection:
    def test_heat_section_builds_field(self):
        cfg = validate_section(
            HeatConfig,
            "heat",
            {"initial": "bubble", "bubble_p": "3", "s": "1", "p": "4,2", "times": "0.1, 1", "L": "16", "n": "256"},
            with_field=True,
        )
        assert cfg.field.family == "bubble"
        assert cfg.field.p == 3.0
        assert cfg.field.grid.L == 16.0
        assert cfg.field.grid.n == 256
        assert cfg.times == [0.1, 1.0]
        assert cfg.q_list == []

    def test_grid_defaults_fill_missing_axis(self):
        cfg = validate_section(
            SchrodingerConfig, "schrodinger", {"N": "2", "times": "0.1", "n": "64"}, with_field=True
        )
        assert cfg.field.N == 2
        assert cfg.field.grid.n == 64
        assert cfg.field.grid.L > 0

    def test_lists(self):
        cfg = validate_section(
            SchrodingerConfig, "schrodinger", {"times": "0.1", "probes": "0, 0.5", "epsilons": "0.5,0.25"},
            with_field=True,
        )
        assert cfg.probes == [0.0, 0.5]
        assert cfg.epsilons == [0.5, 0.25]

    @pytest.mark.parametrize("data, field", [
        ({"p": "2", "times": "0.1"}, "heat.s"),
        ({"s": "1", "p": "2", "times": "0.1", "sigma": "-1"}, "heat.sigma"),
        ({"s": "1", "p": "2", "times": "0.1", "bubble_p": "1"}, "heat.bubble_p"),
        ({"s": "1", "p": "2", "times": "0.1", "n": "4"}, "heat.n"),
        ({"s": "1", "p": "2", "times": "0.1", "initial": "cube"}, "heat.family"),
        ({"s": "1", "p": "2", "times": "0.1", "initial": "file"}, "heat.family"),
        ({"s": "1", "p": "2", "times": "0.1", "foo": "1"}, "heat.foo"),
    ])
    def test_error_names_field(self, data, field):
        with pytest.raises(ConfigError) as exc:
            validate_section(HeatConfig, "heat", data, with_field=True)
        assert exc.value.field == field

    def test_norm_kind(self):
        with pytest.raises(ConfigError) as exc:
            validate_section(NormConfig, "norm", {"kind": "sup"}, with_field=True)
        assert exc.value.field == "norm.kind"


@pytest.mark.unit
class TestPrecedence:
    def test_flags_override_file(self):
        merged = merge_sections({"s": "1", "p": "2"}, {"s": "1/2", "p": None})
        assert merged == {"s": "1/2", "p": "2"}

    def test_missing_file_section(self):
        assert merge_sections(None, {"n": 64}) == {"n": 64}

    def test_environment_over_file(self, monkeypatch):
        monkeypatch.setenv("RUN_SEED", "11")
        monkeypatch.delenv("RUN_THREADS", raising=False)
        g = resolve_global({"seed": "3", "threads": "2"}, {})
        assert g.seed == 11
        assert g.threads == 2

    def test_flags_over_environment(self, monkeypatch):
        monkeypatch.setenv("RUN_SEED", "11")
        g = resolve_global({}, {"seed": 5, "format": "csv"})
        assert g.seed == 5
        assert g.format == "csv"

    def test_invalid_threads(self, monkeypatch):
        monkeypatch.delenv("RUN_THREADS", raising=False)
        with pytest.raises(ConfigError) as exc:
            resolve_global({"threads": "0"}, {})
        assert exc.value.field == "global.threads"
