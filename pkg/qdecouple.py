"""
qdecouple 命令列
推導並快取改寫規則、輸出矩陣與影像、執行驗證套件並寫出 JSON 報告

退出碼：0 全部通過、1 有失敗、2 只有無法判定、3 用法或設定錯誤
"""

import argparse
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from core import CheckReport, CheckResult, CheckStatus, RuleCache
from core.state_manager import atomic_write
from core.tensor import SchemeError, dump_document
from presets import create_engine
from utils import ConfigError, ConfigLoader, LogIcons, RunConfig, VerifyLogger
from utils.config_loader import EMIT_TARGETS, SUITES, parse_seed


EXIT_USAGE = 3
DEFAULT_CONFIG = "config/base.yaml"
CACHE_ENV = "QDECOUPLE_CACHE"


class _Parser(argparse.ArgumentParser):
    """參數錯誤以退出碼 3 結束（2 保留給 INCONCLUSIVE）"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: 錯誤: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--case', choices=['sl', 'so'], help='矩陣層級的情形 (預設: so)')
    parser.add_argument('--n', type=int, dest='N', help='N (預設: 3)')
    parser.add_argument('--preset', help='預設: euclid:soN、cross:soN、heis:slN[:eps±1]、heis:soN[:eps±1]')
    parser.add_argument('--epsilon', type=int, choices=[1, -1], help='Heisenberg 的 ε (預設: +1)')
    parser.add_argument('--gamma', help='γ 覆寫檔路徑或 default')
    parser.add_argument('--cache-dir', help=f'規則快取資料夾（未指定時讀取環境變數 {CACHE_ENV}）')
    parser.add_argument('--report', help='JSON 報告輸出路徑')
    parser.add_argument('--jobs', type=int, help='並行執行緒數')
    parser.add_argument('--seed', help='取樣種子，可用十六進位 (預設: 0xD5EED)')
    parser.add_argument('--config', help=f'YAML 設定檔 (預設: {DEFAULT_CONFIG}，不存在時使用內建值)')
    parser.add_argument('--verbose', action='store_true', help='終端輸出除錯訊息')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog='qdecouple',
        description='q-變形代數的精確符號驗證',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
範例:
  # 輸出 so(3) 的 \\hat R
  python qdecouple.py emit rhat --case so --n 3

  # 推導並快取歐氏量子空間的規則（含局部合流檢查）
  python qdecouple.py derive --preset euclid:so5

  # 交叉積的 ζ 交換子檢查，寫出報告
  python qdecouple.py verify --preset cross:so3 --suite commutant --report out/commutant.json

  # Heisenberg 代數的全部套件，4 個執行緒
  python qdecouple.py verify --preset heis:so3:eps+1 --suite all --jobs 4
        """
    )
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    emit = sub.add_parser('emit', help='輸出 JSON 文件')
    emit.add_argument('what', choices=list(EMIT_TARGETS), help='輸出目標')
    emit.add_argument('--out', help='輸出檔案（未指定時寫到標準輸出）')
    _add_common(emit)

    verify = sub.add_parser('verify', help='執行驗證套件')
    verify.add_argument('--suite', choices=list(SUITES), help='套件 (預設: all)')
    _add_common(verify)

    derive = sub.add_parser('derive', help='推導規則並檢查局部合流')
    _add_common(derive)
    return parser


def load_file_config(path: Optional[str]) -> Dict[str, Any]:
    """
    Raises:
        ConfigError: 明確指定的設定檔不存在或格式錯誤
    """
    target = path or DEFAULT_CONFIG
    try:
        return ConfigLoader.load(target)
    except FileNotFoundError as e:
        if path:
            raise ConfigError(str(e)) from e
        return {}


def build_run_config(args: argparse.Namespace, file_config: Dict[str, Any]) -> RunConfig:
    """CLI 參數 > 環境變數 > YAML > 內建預設"""
    get = ConfigLoader.get_nested
    defaults = RunConfig(command=args.command)

    def pick(value, path, fallback):
        if value is not None:
            return value
        return get(file_config, path, fallback)

    cache_dir = args.cache_dir or os.getenv(CACHE_ENV) or get(file_config, 'cache.dir', defaults.cache_dir)
    config = RunConfig(
        command=args.command,
        preset=args.preset or "",
        case=args.case or defaults.case,
        N=args.N if args.N is not None else defaults.N,
        epsilon=args.epsilon if args.epsilon is not None else defaults.epsilon,
        gamma=args.gamma or defaults.gamma,
        suite=getattr(args, 'suite', None) or defaults.suite,
        what=getattr(args, 'what', "") or "",
        cache_dir=cache_dir,
        report=args.report,
        jobs=int(pick(args.jobs, 'engine.jobs', defaults.jobs)),
        seed=parse_seed(pick(args.seed, 'engine.seed', defaults.seed)),
        fuel=int(get(file_config, 'engine.fuel', defaults.fuel)),
        log_dir=get(file_config, 'run.log_dir', defaults.log_dir),
        sampling=dict(get(file_config, 'sampling', {}) or {}),
    )
    config.validate()
    return config


def write_report(report: CheckReport, path: Optional[str], logger: VerifyLogger) -> None:
    if not path:
        return
    atomic_write(Path(path), report.to_json(), logger=logger)
    logger.success(LogIcons.COMPLETE, f"報告已寫入: {path}")


def print_summary(report: CheckReport, limit: int = 10) -> None:
    """人類可讀摘要（標準輸出）"""
    print(f"{report.suite} [{report.preset}] {report.status.value} {report.summary_line()}")
    shown: List[CheckResult] = [c for c in report.checks if c.status != CheckStatus.PASS][:limit]
    for check in shown:
        detail = f": {check.detail}" if check.detail else ""
        print(f"  {check.status.value:<12} {check.id}{detail}")
    hidden = report.count(CheckStatus.FAIL) + report.count(CheckStatus.INCONCLUSIVE) - len(shown)
    if hidden > 0:
        print(f"  ……另有 {hidden} 筆未列出，詳見報告")


def cmd_emit(engine, config: RunConfig, out: Optional[str], logger: VerifyLogger) -> int:
    doc = engine.emit(config.what)
    text = dump_document(doc)
    if out:
        atomic_write(Path(out), text, logger=logger)
        logger.success(LogIcons.COMPLETE, f"已輸出 {config.what}: {out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(engine, config: RunConfig, logger: VerifyLogger) -> int:
    report = engine.run_suite(config.suite)
    write_report(report, config.report, logger)
    print_summary(report)
    return report.exit_code()


def cmd_derive(engine, config: RunConfig, logger: VerifyLogger) -> int:
    report = engine.derive()
    write_report(report, config.report, logger)
    print_summary(report)
    return report.exit_code()


def main(argv: Optional[List[str]] = None) -> int:
    """主函數"""
    args = build_parser().parse_args(argv)

    try:
        file_config = load_file_config(args.config)
        config = build_run_config(args, file_config)
    except ConfigError as e:
        print(f"❌ 設定錯誤: {e}", file=sys.stderr)
        return EXIT_USAGE

    run_name = ConfigLoader.get_nested(file_config, 'run.name', 'qdecouple')
    # emit 寫到標準輸出時日誌改走 stderr
    stream = sys.stderr if config.command == 'emit' and not args.out else None
    logger = VerifyLogger(f"{run_name}_{config.command}", log_dir=config.log_dir, verbose=args.verbose,
                          stream=stream)
    logger.info(LogIcons.START, f"{config.command} 開始: preset={config.preset or '(無)'}, "
                                f"case={config.case}, N={config.N}")

    try:
        cache = RuleCache(config.cache_dir, logger=logger)
        engine = create_engine(config, cache, logger)
        if config.command == 'emit':
            return cmd_emit(engine, config, args.out, logger)
        if config.command == 'verify':
            return cmd_verify(engine, config, logger)
        return cmd_derive(engine, config, logger)
    except (ConfigError, SchemeError) as e:
        logger.error(LogIcons.ERROR, f"設定錯誤: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning(LogIcons.WARNING, "使用者中斷")
        return 2
    except Exception as e:
        # 套件之外的例外：寫出只含錯誤的部分報告
        logger.error(LogIcons.ERROR, f"執行錯誤: {e}", exc_info=True)
        report = CheckReport(suite=config.suite if config.command == 'verify' else config.command,
                             preset=config.preset, gamma=config.gamma)
        report.add(CheckResult(f"{config.command}:error", CheckStatus.INCONCLUSIVE,
                               detail=f"{type(e).__name__}: {e}"))
        write_report(report, config.report, logger)
        return report.exit_code()


if __name__ == '__main__':
    sys.exit(main())
