"""
哈希計算器
對快取參數與文件內容計算 MD5，用於快取鍵與決定性比對
"""

import hashlib
import json
from typing import Any, Dict, Union


class HashCalculator:
    """內容哈希計算器"""

    @staticmethod
    def canonical(obj: Any) -> bytes:
        """固定鍵序、無多餘空白的 JSON 位元組"""
        return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")

    @staticmethod
    def calculate(source: Union[str, bytes, Dict, list]) -> str:
        """
        計算 MD5

        Args:
            source: 字串、位元組，或可 JSON 化的 dict / list（以標準形計算）

        Example:
            key = HashCalculator.calculate({"preset": "euclid:so3", "N": 3})
        """
        if isinstance(source, bytes):
            data = source
        elif isinstance(source, str):
            data = source.encode("utf-8")
        elif isinstance(source, (dict, list)):
            data = HashCalculator.canonical(source)
        else:
            raise TypeError(f"不支援的類型: {type(source)}，僅支援 str, bytes, dict, list")
        return hashlib.md5(data).hexdigest()

    @staticmethod
    def content_key(kind: str, params: Dict[str, Any], engine_version: str) -> str:
        """快取鍵：(引擎版本, 類別, 參數)"""
        return HashCalculator.calculate({"engine_version": engine_version, "kind": kind, "params": params})

    @staticmethod
    def compare(hash1: str, hash2: str) -> bool:
        return hash1.lower() == hash2.lower()
