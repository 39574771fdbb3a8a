"""
測試命令列：參數與設定錯誤的退出碼、emit 輸出、verify 報告
"""

import json

import pytest

from qdecouple import EXIT_USAGE, build_parser, main


@pytest.fixture
def workspace(tmp_path):
    """獨立的設定檔與快取資料夾（run.name 以暫存目錄區分，避免共用 logger）"""
    config = tmp_path / "config.yaml"
    config.write_text(
        f'run:\n  name: "cli_{tmp_path.name}"\n  log_dir: null\n'
        'engine:\n  fuel: 100000\n  jobs: 1\n  seed: "0x1"\n'
        f'cache:\n  dir: "{tmp_path / "cache"}"\n',
        encoding="utf-8",
    )
    return tmp_path, ["--config", str(config), "--cache-dir", str(tmp_path / "cache")]


class TestUsageErrors:

    def test_unknown_suite(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "bogus"])
        assert exc.value.code == EXIT_USAGE

    def test_missing_command(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE

    def test_bad_jobs(self, workspace):
        _, common = workspace
        assert main(["verify", "--suite", "braid", "--jobs", "0", *common]) == EXIT_USAGE

    def test_derive_without_preset(self, workspace):
        _, common = workspace
        assert main(["derive", *common]) == EXIT_USAGE

    def test_explicit_config_missing(self, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "missing.yaml")]) == EXIT_USAGE

    def test_suite_not_for_preset(self, workspace):
        _, common = workspace
        assert main(["verify", "--preset", "euclid:so3", "--suite", "commutant", *common]) == EXIT_USAGE

    def test_bad_seed(self, workspace):
        _, common = workspace
        assert main(["verify", "--suite", "braid", "--seed", "abc", *common]) == EXIT_USAGE


class TestEmit:

    def test_rhat_to_file(self, workspace):
        tmp_path, common = workspace
        out = tmp_path / "rhat.json"
        assert main(["emit", "rhat", "--case", "sl", "--n", "2", "--out", str(out), *common]) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["object"] == "rhat"
        assert doc["case"] == "sl" and doc["N"] == 2

    def test_rhat_stdout_is_json(self, workspace, capsys):
        _, common = workspace
        assert main(["emit", "metric", "--case", "so", "--n", "3", *common]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["object"] == "metric"

    def test_deterministic(self, workspace):
        tmp_path, common = workspace
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        main(["emit", "projectors", "--case", "so", "--n", "3", "--out", str(first), *common])
        main(["emit", "projectors", "--case", "so", "--n", "3", "--out", str(second), *common])
        assert first.read_bytes() == second.read_bytes()


class TestVerify:

    def test_braid_report(self, workspace):
        tmp_path, common = workspace
        report_path = tmp_path / "out" / "braid.json"
        code = main(["verify", "--case", "so", "--n", "3", "--suite", "braid",
                     "--report", str(report_path), *common])
        assert code == 0
        data = json.loads(report_path.read_text(encoding="utf-8"))
        assert data["suite"] == "braid"
        assert data["summary"]["fail"] == 0
        assert data["summary"]["pass"] > 0

    def test_parser_defaults(self):
        args = build_parser().parse_args(["verify"])
        assert args.suite is None and args.N is None


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
