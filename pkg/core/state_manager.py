"""
快取管理器
規則集與矩陣文件的磁碟快取：內容哈希為鍵、原子寫入、版本不符即忽略
"""

import json
import os
from pathlib import Path
from tempfile import NamedTemporaryFile
from typing import Any, Dict, List, Optional

from utils.retry import retry

from .hash_calculator import HashCalculator
from .rewriting import ENGINE_VERSION, RuleSet


@retry(max_attempts=3, exceptions=(OSError,))
def _replace(tmp_name: str, target: str, logger=None) -> None:
    os.replace(tmp_name, target)


def atomic_write(path: Path, text: str, logger=None) -> None:
    """寫入暫存檔後 rename，中斷不會留下半個 JSON"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with NamedTemporaryFile(
        mode="w",
        encoding="utf-8",
        delete=False,
        dir=str(path.parent),
        suffix=".tmp",
    ) as tf:
        tf.write(text)
        tf.flush()
        os.fsync(tf.fileno())
        tmp_name = tf.name
    _replace(tmp_name, str(path), logger=logger)


class RuleCache:
    """規則與矩陣快取"""

    def __init__(self, cache_dir: str, logger=None):
        self.cache_dir = Path(cache_dir)
        self.logger = logger
        self.hits = 0
        self.misses = 0
        # 載入時的警告，由上層用 logger 輸出
        self._load_warnings: List[str] = []

    def path_for(self, kind: str, key: str) -> Path:
        slug = kind.replace(":", "_").replace("/", "_")
        return self.cache_dir / f"{slug}_{key[:16]}.json"

    # ─────────────────────────────────────────────────────────────
    # 通用文件
    # ─────────────────────────────────────────────────────────────

    def load_document(self, kind: str, params: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        """
        讀取快取文件；不存在、損壞、版本或哈希不符時回傳 None 並記下警告
        """
        key = HashCalculator.content_key(kind, params, ENGINE_VERSION)
        path = self.path_for(kind, key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            with open(path, "r", encoding="utf-8") as f:
                envelope = json.load(f)
        except (OSError, ValueError) as e:
            self._load_warnings.append(f"快取損壞，重新計算: {path.name} ({e})")
            self.misses += 1
            return None
        if envelope.get("engine_version") != ENGINE_VERSION:
            self._load_warnings.append(f"快取版本不符，忽略: {path.name}")
            self.misses += 1
            return None
        payload = envelope.get("payload")
        if envelope.get("key") != key or payload is None or \
                not HashCalculator.compare(envelope.get("payload_hash", ""), HashCalculator.calculate(payload)):
            self._load_warnings.append(f"快取內容被修改，忽略: {path.name}")
            self.misses += 1
            return None
        self.hits += 1
        return payload

    def save_document(self, kind: str, params: Dict[str, Any], payload: Dict[str, Any]) -> Path:
        key = HashCalculator.content_key(kind, params, ENGINE_VERSION)
        envelope = {
            "engine_version": ENGINE_VERSION,
            "kind": kind,
            "key": key,
            "params": params,
            "payload_hash": HashCalculator.calculate(payload),
            "payload": payload,
        }
        path = self.path_for(kind, key)
        atomic_write(path, json.dumps(envelope, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                     logger=self.logger)
        return path

    # ─────────────────────────────────────────────────────────────
    # 規則集
    # ─────────────────────────────────────────────────────────────

    def load_rules(self, preset: str, params: Dict[str, Any], fuel: int) -> Optional[RuleSet]:
        payload = self.load_document(f"rules:{preset}", params)
        if payload is None:
            return None
        try:
            return RuleSet.from_dict(payload, fuel=fuel)
        except (KeyError, ValueError, TypeError) as e:
            self._load_warnings.append(f"快取規則無法還原，重新計算: {preset} ({e})")
            self.hits -= 1
            self.misses += 1
            return None

    def save_rules(self, preset: str, params: Dict[str, Any], rules: RuleSet) -> Path:
        return self.save_document(f"rules:{preset}", params, rules.to_dict())

    def get_load_warnings(self) -> List[str]:
        warnings, self._load_warnings = self._load_warnings, []
        return warnings
