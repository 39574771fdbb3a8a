"""
測試規則快取

涵蓋：
  - 存取命中與未命中
  - 損壞、版本不符、內容被修改的快取一律忽略並留下警告
  - 規則集經快取還原後正規形不變
  - rename 的重試
"""

import json

import pytest

from core.ncpoly import Alphabet, Family, Letter, NCPoly
from core.rewriting import RuleSet
from core.scalar import q
from core.state_manager import RuleCache, atomic_write
from utils.retry import retry


PARAMS = {"N": 3}


@pytest.fixture
def cache(tmp_path):
    return RuleCache(str(tmp_path / "cache"))


def _rules():
    alphabet = Alphabet(Letter(n, Family.COORD, position=i) for i, n in enumerate(("x", "y")))
    rules = RuleSet(alphabet, meta={"preset": "toy", "params": PARAMS})
    rules.add_rule(("y", "x"), NCPoly.word(("x", "y"), q))
    return rules


class TestDocuments:

    def test_miss_then_hit(self, cache):
        assert cache.load_document("rhat", PARAMS) is None
        cache.save_document("rhat", PARAMS, {"entries": [1, 2]})
        assert cache.load_document("rhat", PARAMS) == {"entries": [1, 2]}
        assert (cache.hits, cache.misses) == (1, 1)

    def test_params_change_key(self, cache):
        cache.save_document("rhat", PARAMS, {"entries": []})
        assert cache.load_document("rhat", {"N": 5}) is None

    def test_corrupt_file(self, cache):
        path = cache.save_document("rhat", PARAMS, {"entries": []})
        path.write_text("{ not json", encoding="utf-8")
        assert cache.load_document("rhat", PARAMS) is None
        warnings = cache.get_load_warnings()
        assert len(warnings) == 1 and "損壞" in warnings[0]
        assert cache.get_load_warnings() == []

    def test_version_mismatch(self, cache):
        path = cache.save_document("rhat", PARAMS, {"entries": []})
        envelope = json.loads(path.read_text(encoding="utf-8"))
        envelope["engine_version"] = "0.0.1"
        path.write_text(json.dumps(envelope), encoding="utf-8")
        assert cache.load_document("rhat", PARAMS) is None
        assert "版本" in cache.get_load_warnings()[0]

    def test_tampered_payload(self, cache):
        path = cache.save_document("rhat", PARAMS, {"entries": [1]})
        envelope = json.loads(path.read_text(encoding="utf-8"))
        envelope["payload"]["entries"] = [2]
        path.write_text(json.dumps(envelope), encoding="utf-8")
        assert cache.load_document("rhat", PARAMS) is None
        assert "修改" in cache.get_load_warnings()[0]

    def test_path_slug(self, cache):
        path = cache.path_for("rules:euclid:so3", "0123456789abcdef0123")
        assert path.name == "rules_euclid_so3_0123456789abcdef.json"

    def test_no_tmp_left(self, cache):
        cache.save_document("rhat", PARAMS, {"entries": []})
        assert not list(cache.cache_dir.glob("*.tmp"))


class TestRules:

    def test_round_trip(self, cache):
        rules = _rules()
        cache.save_rules("toy", PARAMS, rules)
        restored = cache.load_rules("toy", PARAMS, fuel=1000)
        assert restored is not None
        assert restored.fuel == 1000
        word = NCPoly.word(("y", "y", "x"))
        assert restored.normal_form(word).terms == rules.normal_form(word).terms

    def test_unrestorable_payload(self, cache):
        cache.save_document("rules:toy", PARAMS, {"alphabet": "garbage"})
        assert cache.load_rules("toy", PARAMS, fuel=1000) is None
        assert cache.hits == 0
        assert cache.get_load_warnings()


class TestRetry:

    def test_retries_then_succeeds(self):
        calls = []

        @retry(max_attempts=3, delay=0.0, exceptions=(OSError,))
        def flaky():
            calls.append(1)
            if len(calls) < 3:
                raise OSError("busy")
            return "ok"

        assert flaky() == "ok"
        assert len(calls) == 3

    def test_gives_up(self):
        @retry(max_attempts=2, delay=0.0, exceptions=(OSError,))
        def broken():
            raise OSError("busy")

        with pytest.raises(OSError):
            broken()

    def test_other_exceptions_not_retried(self):
        calls = []

        @retry(max_attempts=3, delay=0.0, exceptions=(OSError,))
        def wrong():
            calls.append(1)
            raise ValueError("bad")

        with pytest.raises(ValueError):
            wrong()
        assert len(calls) == 1

    def test_atomic_write(self, tmp_path):
        target = tmp_path / "sub" / "doc.json"
        atomic_write(target, "{}\n")
        assert target.read_text(encoding="utf-8") == "{}\n"


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
