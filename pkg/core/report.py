"""
驗證報告
每個恆等式一筆 PASS / FAIL / INCONCLUSIVE 判定，可序列化為 JSON
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class CheckStatus(str, Enum):
    """判定結果"""
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class CheckResult:
    """單一恆等式實例的判定"""
    id: str
    status: CheckStatus
    residual_terms: int = 0
    millis: int = 0
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "id": self.id,
            "status": self.status.value,
            "residual_terms": self.residual_terms,
            "millis": self.millis,
        }
        if self.detail:
            data["detail"] = self.detail
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckResult":
        return cls(
            id=data["id"],
            status=CheckStatus(data["status"]),
            residual_terms=int(data.get("residual_terms", 0)),
            millis=int(data.get("millis", 0)),
            detail=data.get("detail", ""),
        )


@dataclass
class CheckReport:
    """一個驗證套件的完整報告"""
    suite: str
    preset: str
    gamma: str = "default"
    checks: List[CheckResult] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)

    def add(self, result: CheckResult) -> None:
        self.checks.append(result)

    def record(self, check_id: str, passed: bool, residual_terms: int = 0, detail: str = "") -> CheckResult:
        """以布林結果新增一筆（用於矩陣層級的精確比較）"""
        result = CheckResult(
            id=check_id,
            status=CheckStatus.PASS if passed else CheckStatus.FAIL,
            residual_terms=residual_terms,
            detail=detail,
        )
        self.add(result)
        return result

    def merge(self, other: "CheckReport", prefix: str = "") -> None:
        for check in other.checks:
            self.add(CheckResult(
                id=f"{prefix}{check.id}",
                status=check.status,
                residual_terms=check.residual_terms,
                millis=check.millis,
                detail=check.detail,
            ))
        for key, value in other.notes.items():
            self.notes[f"{prefix}{key}"] = value

    def sort(self) -> None:
        """依實例鍵排序，保證並行執行後輸出一致"""
        self.checks.sort(key=lambda c: c.id)

    def count(self, status: CheckStatus) -> int:
        return sum(1 for c in self.checks if c.status == status)

    @property
    def summary(self) -> Dict[str, int]:
        return {
            "pass": self.count(CheckStatus.PASS),
            "fail": self.count(CheckStatus.FAIL),
            "inconclusive": self.count(CheckStatus.INCONCLUSIVE),
        }

    def summary_line(self) -> str:
        """變更摘要（終端輸出用）"""
        s = self.summary
        return f"✓{s['pass']} ✗{s['fail']} ?{s['inconclusive']}"

    @property
    def status(self) -> CheckStatus:
        s = self.summary
        if s["fail"]:
            return CheckStatus.FAIL
        if s["inconclusive"]:
            return CheckStatus.INCONCLUSIVE
        return CheckStatus.PASS

    def all_passed(self) -> bool:
        return self.status == CheckStatus.PASS

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if c.status == CheckStatus.FAIL]

    def find(self, check_id: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.id == check_id:
                return c
        return None

    def exit_code(self) -> int:
        """0 全部通過、1 有失敗、2 只有無法判定"""
        return {CheckStatus.PASS: 0, CheckStatus.FAIL: 1, CheckStatus.INCONCLUSIVE: 2}[self.status]

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        checks = []
        for c in self.checks:
            data = c.to_dict()
            if not include_timings:
                data["millis"] = 0
            checks.append(data)
        out = {
            "suite": self.suite,
            "preset": self.preset,
            "gamma": self.gamma,
            "checks": checks,
            "summary": self.summary,
        }
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings), ensure_ascii=False, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckReport":
        report = cls(suite=data["suite"], preset=data["preset"], gamma=data.get("gamma", "default"))
        report.checks = [CheckResult.from_dict(c) for c in data.get("checks", [])]
        report.notes = dict(data.get("notes", {}))
        return report


def combine_exit_codes(reports: List[CheckReport]) -> int:
    """多份報告的總結退出碼"""
    statuses = {r.status for r in reports}
    if CheckStatus.FAIL in statuses:
        return 1
    if CheckStatus.INCONCLUSIVE in statuses:
        return 2
    return 0
