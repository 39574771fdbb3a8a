"""
測試設定載入與 RunConfig 驗證
"""

import pytest

from utils.config_loader import DEFAULT_SEED, ConfigError, ConfigLoader, RunConfig, parse_seed


BASE_YAML = """
run:
  name: "test"
  log_dir: null
engine:
  fuel: 5000
  jobs: 2
cache:
  dir: "${QDECOUPLE_TEST_CACHE:-.cache_default}"
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(BASE_YAML, encoding="utf-8")
    return path


class TestConfigLoader:

    def test_load(self, config_file, monkeypatch):
        monkeypatch.delenv("QDECOUPLE_TEST_CACHE", raising=False)
        config = ConfigLoader.load(str(config_file))
        assert config["engine"]["fuel"] == 5000
        assert config["run"]["log_dir"] is None
        assert config["cache"]["dir"] == ".cache_default"

    def test_env_override(self, config_file, monkeypatch):
        monkeypatch.setenv("QDECOUPLE_TEST_CACHE", "/tmp/shared")
        assert ConfigLoader.load(str(config_file))["cache"]["dir"] == "/tmp/shared"

    def test_env_without_default(self, tmp_path, monkeypatch):
        monkeypatch.delenv("QDECOUPLE_TEST_MISSING", raising=False)
        path = tmp_path / "config.yaml"
        path.write_text(BASE_YAML.replace("${QDECOUPLE_TEST_CACHE:-.cache_default}",
                                          "${QDECOUPLE_TEST_MISSING}"), encoding="utf-8")
        with pytest.raises(ConfigError):
            ConfigLoader.load(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ConfigLoader.load(str(tmp_path / "missing.yaml"))

    def test_missing_required_field(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("run:\n  name: x\nengine:\n  fuel: 1\n", encoding="utf-8")
        with pytest.raises(ConfigError) as exc:
            ConfigLoader.load(str(path))
        assert "engine.jobs" in str(exc.value)

    def test_get_nested(self):
        config = {"engine": {"fuel": 10}}
        assert ConfigLoader.get_nested(config, "engine.fuel") == 10
        assert ConfigLoader.get_nested(config, "engine.jobs", 4) == 4
        assert ConfigLoader.get_nested(config, "run.name.x", "d") == "d"


class TestParseSeed:

    @pytest.mark.parametrize("text,expected", [("0xD5EED", DEFAULT_SEED), ("42", 42), (7, 7)])
    def test_valid(self, text, expected):
        assert parse_seed(text) == expected

    def test_invalid(self):
        with pytest.raises(ConfigError):
            parse_seed("seed")


class TestRunConfig:

    def test_defaults_valid(self):
        RunConfig(command="verify").validate()

    @pytest.mark.parametrize("kwargs", [
        {"jobs": 0},
        {"epsilon": 2},
        {"case": "sp"},
        {"preset": "torus:so3"},
        {"suite": "everything"},
        {"suite": "commutant"},
        {"preset": "euclid:so3", "suite": "homomorphism"},
        {"preset": "heis:sl2", "suite": "reorder"},
    ])
    def test_invalid_verify(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(command="verify", **kwargs).validate()

    def test_derive_needs_preset(self):
        with pytest.raises(ConfigError):
            RunConfig(command="derive").validate()
        RunConfig(command="derive", preset="euclid:so3").validate()

    @pytest.mark.parametrize("what,preset", [
        ("nothing", ""),
        ("rules", ""),
        ("phi-images", ""),
        ("zeta-images", "euclid:so3"),
    ])
    def test_invalid_emit(self, what, preset):
        with pytest.raises(ConfigError):
            RunConfig(command="emit", what=what, preset=preset).validate()

    def test_valid_emit(self):
        RunConfig(command="emit", what="rhat").validate()
        RunConfig(command="emit", what="phi-images", preset="cross:so3").validate()

    def test_preset_kind(self):
        assert RunConfig(command="verify", preset="heis:so3:eps-1").preset_kind == "heis"
        assert RunConfig(command="verify").preset_kind == ""

    def test_params(self):
        params = RunConfig(command="verify", preset="cross:so3").params()
        assert params["preset"] == "cross:so3"
        assert params["gamma"] == "default"


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
