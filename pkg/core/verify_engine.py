"""
驗證引擎基類
預設（preset）的規則取得、快取、套件分派與逐實例並行檢查
"""

import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, List, Optional, Tuple

from utils import LogIcons, VerifyLogger
from utils.config_loader import ConfigError, RunConfig

from .report import CheckReport, CheckResult, CheckStatus
from .rewriting import NonTerminationError, Overlap, RuleSet, check_local_confluence
from .state_manager import RuleCache
from .tensor import (
    IndexScheme, Mat4, build_metric, build_projectors, build_rhat, load_matrix, matrix_document,
    metric_document, verify_braid, verify_projectors,
)


Instance = Tuple[str, Callable[[], CheckResult]]


class BaseVerifyEngine(ABC):
    """驗證引擎基類"""

    def __init__(self, config: RunConfig, cache: RuleCache, logger: VerifyLogger):
        """
        初始化驗證引擎

        Args:
            config: 執行設定
            cache: 規則快取
            logger: 日誌記錄器
        """
        self.config = config
        self.cache = cache
        self.logger = logger

        self.max_workers = config.jobs
        self.seed = config.seed
        self.fuel = config.fuel
        self._rules: Optional[RuleSet] = None

        # 輸出快取先前累積的警告（此時 logger 已就緒）
        self._flush_cache_warnings()

    # ─────────────────────────────────────────────────────────────
    # 子類介面
    # ─────────────────────────────────────────────────────────────

    @property
    @abstractmethod
    def preset_id(self) -> str:
        """預設識別字（報告與快取用）"""

    @property
    @abstractmethod
    def scheme(self) -> IndexScheme:
        """矩陣層級的索引方案"""

    @abstractmethod
    def build_rules(self) -> RuleSet:
        """
        建構規則集（由子類實現，不經快取）

        子類可同時保存完整的預設物件。
        """

    @abstractmethod
    def suites(self) -> Dict[str, Callable[[], CheckReport]]:
        """套件名稱 → 產生報告的函數（不含 all）"""

    def restore(self, rules: RuleSet) -> None:
        """以快取規則還原預設物件（預設不需要）"""

    def rule_params(self) -> Dict[str, Any]:
        return {"preset": self.preset_id}

    def image_document(self, what: str) -> Dict[str, Any]:
        raise ConfigError(f"預設 {self.preset_id} 沒有 {what} 可輸出")

    # ─────────────────────────────────────────────────────────────
    # 規則與快取
    # ─────────────────────────────────────────────────────────────

    def _flush_cache_warnings(self) -> None:
        for warn in self.cache.get_load_warnings():
            self.logger.warning(LogIcons.WARNING, warn)

    def get_rules(self) -> RuleSet:
        """先查快取，未命中才推導並寫回"""
        if self._rules is not None:
            return self._rules

        params = self.rule_params()
        rules = self.cache.load_rules(self.preset_id, params, self.fuel)
        self._flush_cache_warnings()
        if rules is not None:
            self.logger.info(LogIcons.CACHE, f"快取命中: {self.preset_id}（{len(rules)} 條規則）")
            self.restore(rules)
            self._rules = rules
            return rules

        self.logger.info(LogIcons.BUILD, f"推導規則: {self.preset_id}")
        t0 = time.perf_counter()
        rules = self.build_rules()
        dt = time.perf_counter() - t0
        path = self.cache.save_rules(self.preset_id, params, rules)
        self.logger.success(
            LogIcons.CACHE,
            f"規則已寫入快取: {path.name}（{len(rules)} 條，耗時 {dt:.2f}s）"
        )
        self._rules = rules
        return rules

    # ─────────────────────────────────────────────────────────────
    # 套件
    # ─────────────────────────────────────────────────────────────

    def get_rhat(self) -> Mat4:
        """\\hat R（經矩陣快取，文件損壞或被修改時重新計算）"""
        kind = f"rhat:{self.scheme.label}"
        params = {"case": self.scheme.case, "N": self.scheme.N}
        doc = self.cache.load_document(kind, params)
        self._flush_cache_warnings()
        if doc is not None:
            try:
                rhat = load_matrix(doc)
                self.logger.info(LogIcons.CACHE, f"快取命中: {kind}")
                return rhat
            except (KeyError, ValueError) as e:
                self.logger.warning(LogIcons.WARNING, f"矩陣快取無法還原，重新計算: {kind} ({e})")
        rhat = build_rhat(self.scheme)
        self.cache.save_document(kind, params, matrix_document(rhat, "rhat"))
        return rhat

    def matrix_suites(self) -> Dict[str, Callable[[], CheckReport]]:
        return {
            "braid": lambda: verify_braid(self.scheme, self.get_rhat()),
            "projectors": lambda: verify_projectors(self.scheme, self.get_rhat()),
        }

    def confluence_select(self) -> Optional[Callable[[Overlap], bool]]:
        """臨界對篩選（預設全部檢查）"""
        return None

    def confluence_sample(self) -> Optional[int]:
        return None

    def verify_confluence(self) -> CheckReport:
        rules = self.get_rules()
        self.logger.info(LogIcons.DERIVE, f"局部合流檢查: {self.preset_id}")
        report = check_local_confluence(
            rules,
            select=self.confluence_select(),
            sample=self.confluence_sample(),
            seed=self.seed,
        )
        report.preset = self.preset_id
        return report

    def run_suite(self, suite: str) -> CheckReport:
        """
        執行單一套件；all 依序執行全部並以 "套件/" 為前綴合併

        單一套件內的例外不中斷 all，轉為一筆 INCONCLUSIVE。
        """
        table = self.suites()
        if suite != "all":
            if suite not in table:
                raise ConfigError(f"套件 {suite} 不適用於預設 {self.preset_id}")
            return self._run_guarded(suite, table[suite])

        report = CheckReport(suite="all", preset=self.preset_id, gamma=self.config.gamma)
        for name, runner in table.items():
            sub = self._run_guarded(name, runner)
            report.merge(sub, prefix=f"{name}/")
        return report

    def _run_guarded(self, name: str, runner: Callable[[], CheckReport]) -> CheckReport:
        self.logger.info(LogIcons.START, f"套件開始: {name}")
        t0 = time.perf_counter()
        try:
            report = runner()
        except (NonTerminationError, ValueError, KeyError, ArithmeticError) as e:
            self.logger.error(LogIcons.ERROR, f"套件 {name} 異常: {e}", exc_info=True)
            report = CheckReport(suite=name, preset=self.preset_id, gamma=self.config.gamma)
            report.add(CheckResult(f"{name}:error", CheckStatus.INCONCLUSIVE, detail=str(e)))
        report.suite = name
        report.preset = self.preset_id
        report.gamma = self.config.gamma
        dt = time.perf_counter() - t0
        icon = {
            CheckStatus.PASS: LogIcons.PASS,
            CheckStatus.FAIL: LogIcons.FAIL,
            CheckStatus.INCONCLUSIVE: LogIcons.INCONCLUSIVE,
        }[report.status]
        self.logger.info(icon, f"套件完成: {name} {report.summary_line()}，耗時 {dt:.2f}s")
        return report

    def run_instances(self, suite: str, instances: List[Instance]) -> CheckReport:
        """
        並行檢查每個恆等式實例

        每個實例一個任務；例外轉為 INCONCLUSIVE 並附上錯誤訊息；結果依實例鍵排序。
        """
        report = CheckReport(suite=suite, preset=self.preset_id, gamma=self.config.gamma)
        total = len(instances)
        if total == 0:
            self.logger.info(LogIcons.PROGRESS, f"{suite}: 沒有需要檢查的實例，略過。")
            return report

        self.logger.info(
            LogIcons.PROGRESS,
            f"平行檢查中 (執行緒: {self.max_workers})... {suite} 實例: {total}"
        )
        done = 0
        step = max(1, total // 10)

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {
                executor.submit(self._timed, check_id, check): check_id
                for check_id, check in instances
            }
            for future in as_completed(futures):
                check_id = futures[future]
                try:
                    result = future.result()
                except Exception as e:
                    self.logger.error(LogIcons.ERROR, f"實例異常：{check_id}: {e}", exc_info=True)
                    result = CheckResult(check_id, CheckStatus.INCONCLUSIVE, detail=f"{type(e).__name__}: {e}")
                if result.status == CheckStatus.FAIL:
                    self.logger.warning(LogIcons.FAIL, f"{check_id}: 殘差 {result.residual_terms} 項")
                report.add(result)

                done += 1
                if done % step == 0 or done == total:
                    progress = (done * 100.0) / total
                    self.logger.info(LogIcons.PROGRESS, f"{suite} 進度: {done}/{total} ({progress:.1f}%)")

        report.sort()
        return report

    @staticmethod
    def _timed(check_id: str, check: Callable[[], CheckResult]) -> CheckResult:
        t0 = time.perf_counter()
        result = check()
        result.id = check_id
        result.millis = int((time.perf_counter() - t0) * 1000)
        return result

    # ─────────────────────────────────────────────────────────────
    # 指令
    # ─────────────────────────────────────────────────────────────

    def derive(self) -> CheckReport:
        """推導（或讀取快取）規則並檢查局部合流"""
        rules = self.get_rules()
        report = self._run_guarded("confluence", self.verify_confluence)
        report.suite = "derive"
        report.notes["stats"] = rules.stats()
        report.notes.update(rules.meta.get("notes", {}))
        report.notes["cache"] = {"hits": self.cache.hits, "misses": self.cache.misses}
        return report

    def emit(self, what: str) -> Dict[str, Any]:
        """輸出 JSON 文件"""
        if what == "rhat":
            return matrix_document(build_rhat(self.scheme), "rhat")
        if what == "metric":
            return metric_document(build_metric(self.scheme))
        if what == "projectors":
            scheme = self.scheme
            return {
                "case": scheme.case,
                "N": scheme.N,
                "object": "projectors",
                "projectors": [
                    matrix_document(mat, f"P_{label}") for label, mat in build_projectors(scheme)
                ],
            }
        if what == "rules":
            return self.get_rules().to_dict()
        return self.image_document(what)


class TensorVerifyEngine(BaseVerifyEngine):
    """不需改寫規則的矩陣層級檢查（braid / projectors）"""

    def __init__(self, config: RunConfig, cache: RuleCache, logger: VerifyLogger):
        super().__init__(config, cache, logger)
        self._scheme = IndexScheme(config.case, config.N)

    @property
    def preset_id(self) -> str:
        return self._scheme.label

    @property
    def scheme(self) -> IndexScheme:
        return self._scheme

    def build_rules(self) -> RuleSet:
        raise ConfigError("矩陣層級的檢查沒有規則集，請指定 --preset")

    def suites(self) -> Dict[str, Callable[[], CheckReport]]:
        return self.matrix_suites()
