"""
預設模組
預設類別 → 驗證引擎；沒有 --preset 時只跑矩陣層級的檢查
"""

import re

from core import BaseVerifyEngine, RuleCache, TensorVerifyEngine
from utils import VerifyLogger
from utils.config_loader import ConfigError, RunConfig

from .euclid import KIND_CROSS, KIND_EUCLID, EuclidVerifyEngine
from .heisenberg import HeisenbergVerifyEngine


# 預設類別映射
PRESET_ENGINES = {
    KIND_EUCLID: EuclidVerifyEngine,
    KIND_CROSS: EuclidVerifyEngine,
    'heis': HeisenbergVerifyEngine,
}

_EUCLID_ID = re.compile(r'^(euclid|cross):so(\d+)$')


def parse_euclid_id(preset: str) -> int:
    """
    "cross:so4" → 4

    Raises:
        ConfigError: 格式錯誤或 N < 3
    """
    match = _EUCLID_ID.match(preset)
    if not match:
        raise ConfigError(f"預設格式錯誤: {preset}（應為 euclid:soN 或 cross:soN）")
    N = int(match.group(2))
    if N < 3:
        raise ConfigError(f"so 需要 N ≥ 3，得到 {preset}")
    return N


def create_engine(config: RunConfig, cache: RuleCache, logger: VerifyLogger) -> BaseVerifyEngine:
    """
    依 config.preset 建立驗證引擎

    Raises:
        ConfigError: 不支援的預設類別
    """
    kind = config.preset_kind
    if not kind:
        return TensorVerifyEngine(config, cache, logger)

    engine_class = PRESET_ENGINES.get(kind)
    if not engine_class:
        raise ConfigError(f"不支援的預設類別: {kind}")

    if engine_class is EuclidVerifyEngine:
        return engine_class(config, cache, logger, kind=kind, N=parse_euclid_id(config.preset))
    return engine_class(config, cache, logger)


__all__ = [
    'PRESET_ENGINES',
    'create_engine',
    'parse_euclid_id',
]
