"""
測試驗證引擎基類（以矩陣層級引擎為例）

涵蓋：
  - 套件分派與 all 的前綴合併
  - \\hat R 的矩陣快取與被修改時的重算
  - 套件例外與實例例外轉為 INCONCLUSIVE
  - 並行結果依實例鍵排序
  - cross:so3 各套件端到端與 φ 影像輸出
"""

import json

import pytest

from core.report import CheckReport, CheckResult, CheckStatus
from core.state_manager import RuleCache
from core.verify_engine import TensorVerifyEngine
from presets import create_engine
from utils import ConfigError, RunConfig, VerifyLogger


@pytest.fixture(scope='module')
def logger():
    return VerifyLogger("test_verify_engine", log_dir=None)


def _engine(tmp_path, logger, case="sl", N=2, jobs=2):
    config = RunConfig(command="verify", case=case, N=N, jobs=jobs, log_dir=None,
                       cache_dir=str(tmp_path / "cache"))
    cache = RuleCache(config.cache_dir, logger=logger)
    return create_engine(config, cache, logger)


class TestDispatch:

    def test_tensor_engine_selected(self, tmp_path, logger):
        engine = _engine(tmp_path, logger)
        assert isinstance(engine, TensorVerifyEngine)
        assert engine.preset_id == "sl2"

    def test_braid_suite(self, tmp_path, logger):
        report = _engine(tmp_path, logger).run_suite("braid")
        assert report.suite == "braid"
        assert report.preset == "sl2"
        assert report.all_passed()

    def test_all_prefixes(self, tmp_path, logger):
        report = _engine(tmp_path, logger, case="so", N=3).run_suite("all")
        assert report.suite == "all"
        prefixes = {c.id.split("/", 1)[0] for c in report.checks}
        assert prefixes == {"braid", "projectors"}
        assert report.exit_code() == 0

    def test_unknown_suite(self, tmp_path, logger):
        with pytest.raises(ConfigError):
            _engine(tmp_path, logger).run_suite("confluence")

    def test_no_rules(self, tmp_path, logger):
        with pytest.raises(ConfigError):
            _engine(tmp_path, logger).build_rules()


class TestMatrixCache:

    def test_second_engine_hits(self, tmp_path, logger):
        _engine(tmp_path, logger).get_rhat()
        engine = _engine(tmp_path, logger)
        engine.get_rhat()
        assert engine.cache.hits == 1

    def test_tampered_rhat_recomputed(self, tmp_path, logger):
        first = _engine(tmp_path, logger)
        rhat = first.get_rhat()
        path = next(first.cache.cache_dir.glob("rhat_sl2_*.json"))
        envelope = json.loads(path.read_text(encoding="utf-8"))
        envelope["payload"]["entries"][0]["v"] = "( 7 ) / ( 1 )"
        path.write_text(json.dumps(envelope), encoding="utf-8")

        second = _engine(tmp_path, logger)
        assert second.get_rhat().equals(rhat)
        assert second.cache.hits == 0
        assert second.run_suite("braid").all_passed()


class TestGuards:

    def test_suite_exception_inconclusive(self, tmp_path, logger):
        engine = _engine(tmp_path, logger)

        def broken() -> CheckReport:
            raise ValueError("爆炸")

        report = engine._run_guarded("broken", broken)
        assert report.status == CheckStatus.INCONCLUSIVE
        assert report.checks[0].id == "broken:error"
        assert report.preset == "sl2"

    def test_instances_sorted_and_guarded(self, tmp_path, logger):
        engine = _engine(tmp_path, logger, jobs=3)

        def ok():
            return CheckResult("", CheckStatus.PASS)

        def boom():
            raise ZeroDivisionError("除以零")

        report = engine.run_instances("demo", [("c", ok), ("a", boom), ("b", ok)])
        assert [c.id for c in report.checks] == ["a", "b", "c"]
        assert report.find("a").status == CheckStatus.INCONCLUSIVE
        assert "ZeroDivisionError" in report.find("a").detail
        assert report.find("b").status == CheckStatus.PASS

    def test_no_instances(self, tmp_path, logger):
        report = _engine(tmp_path, logger).run_instances("empty", [])
        assert report.checks == []
        assert report.all_passed()


class TestEmit:

    def test_emit_rhat(self, tmp_path, logger):
        doc = _engine(tmp_path, logger).emit("rhat")
        assert doc["object"] == "rhat"
        assert len(doc["entries"]) == 5

    def test_emit_projectors(self, tmp_path, logger):
        doc = _engine(tmp_path, logger, case="so", N=3).emit("projectors")
        assert [p["object"] for p in doc["projectors"]] == ["P_s", "P_a", "P_t"]

    def test_emit_images_unavailable(self, tmp_path, logger):
        with pytest.raises(ConfigError):
            _engine(tmp_path, logger).emit("phi-images")


# ── 交叉積的端到端套件 ─────────────────────────────────────────────────────────

def _preset_engine(cache_dir, logger, preset):
    config = RunConfig(command="verify", preset=preset, jobs=2, log_dir=None, cache_dir=str(cache_dir))
    cache = RuleCache(config.cache_dir, logger=logger)
    return create_engine(config, cache, logger)


@pytest.fixture(scope='module')
def cross_so3(tmp_path_factory, logger):
    return _preset_engine(tmp_path_factory.mktemp("cross_so3"), logger, "cross:so3")


class TestCrossSuites:

    def test_matrix_suites_sl2(self, tmp_path, logger):
        report = _engine(tmp_path, logger, case="sl", N=2).run_suite("all")
        assert report.exit_code() == 0

    def test_homomorphism(self, cross_so3):
        report = cross_so3.run_suite("homomorphism")
        assert report.failures() == []
        assert report.find("crossing-S[+,1,1,0]").status == CheckStatus.PASS
        assert "gamma" in report.notes

    def test_confluence_selected_overlaps(self, cross_so3):
        """只檢查 A 內與 p·p·L、p·L⁻·L⁺ 臨界對，全部可判定"""
        report = cross_so3.run_suite("confluence")
        assert report.checks
        assert report.exit_code() == 0

    def test_variants(self, cross_so3):
        report = cross_so3.run_suite("variants")
        assert report.exit_code() == 0
        assert not [c.id for c in report.checks if c.id.startswith("zeta7")]
        notes = report.notes["zeta7"]
        assert sum(notes["summary"].values()) == 12
        assert set(notes["not_passed"].values()) <= {"FAIL", "INCONCLUSIVE"}

    def test_star(self, cross_so3):
        report = cross_so3.run_suite("star")
        assert report.failures() == []
        assert "real_gamma_search" in report.notes

    def test_emit_phi_images_odd(self, cross_so3):
        """so3 沒有 Cartan 生成元，6 + 6 個 Borel 生成元"""
        images = cross_so3.emit("phi-images")["images"]
        assert len(images) == 12
        assert {entry["sign"] for entry in images} == {"+", "-"}
        assert not any(entry["cartan"] for entry in images)

    def test_emit_phi_images_even(self, tmp_path, logger):
        """so4 每個符號有 10 個 Borel 生成元，其中 L^{±1}_{±1} 兩個屬於 Cartan"""
        images = _preset_engine(tmp_path / "cache", logger, "cross:so4").emit("phi-images")["images"]
        assert len(images) == 20
        cartan = sorted((e["sign"], e["i"]) for e in images if e["cartan"])
        assert cartan == [("+", -1), ("+", 1), ("-", -1), ("-", 1)]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
