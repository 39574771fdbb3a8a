"""
配置載入器
YAML 執行設定、環境變數替換、RunConfig 驗證與 γ 覆寫檔
"""

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml


DEFAULT_SEED = 0xD5EED

SUITES = (
    "braid", "projectors", "confluence", "homomorphism", "commutant", "lemma1",
    "reorder", "star", "heisenberg", "variants", "center", "decomposition", "all",
)

# 預設類別 → 可執行的套件
PRESET_SUITES = {
    "": ("braid", "projectors", "all"),
    "euclid": ("braid", "projectors", "confluence", "star", "center", "all"),
    "cross": ("braid", "projectors", "confluence", "homomorphism", "commutant", "lemma1",
              "reorder", "star", "variants", "center", "decomposition", "all"),
    "heis": ("braid", "projectors", "confluence", "heisenberg", "star", "all"),
}

EMIT_TARGETS = ("rhat", "metric", "projectors", "rules", "phi-images", "zeta-images")


class ConfigError(ValueError):
    """設定不合法（CLI 退出碼 3）"""


class ConfigLoader:
    """配置載入器"""

    _ENV_PATTERN = re.compile(r'\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-([^}]*))?\}')

    @staticmethod
    def load(config_path: str) -> Dict[str, Any]:
        """
        載入配置文件

        Raises:
            FileNotFoundError: 配置文件不存在
            ConfigError: 配置格式錯誤
        """
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"配置文件不存在: {config_path}")

        with open(config_file, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}

        config = ConfigLoader._replace_env_vars(config)
        ConfigLoader._validate_config(config)
        return config

    @staticmethod
    def _replace_env_vars(obj: Any) -> Any:
        """
        遞迴替換 ${VAR} 與 ${VAR:-預設值}
        """
        if isinstance(obj, dict):
            return {k: ConfigLoader._replace_env_vars(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [ConfigLoader._replace_env_vars(item) for item in obj]
        if isinstance(obj, str):
            def replacer(match):
                var_name, fallback = match.group(1), match.group(2)
                value = os.getenv(var_name)
                if value is None:
                    if fallback is None:
                        raise ConfigError(
                            f"環境變數 '{var_name}' 未設定，"
                            f"請執行: export {var_name}='your_value'"
                        )
                    return fallback
                return value
            return ConfigLoader._ENV_PATTERN.sub(replacer, obj)
        return obj

    @staticmethod
    def _validate_config(config: Dict[str, Any]) -> None:
        required_fields = [
            ('run', 'name'),
            ('engine', 'fuel'),
            ('engine', 'jobs'),
            ('cache', 'dir'),
        ]
        for *path, name in required_fields:
            obj = config
            try:
                for key in path:
                    obj = obj[key]
                if name not in obj:
                    raise KeyError
            except (KeyError, TypeError):
                raise ConfigError(f"配置缺少必要欄位: {'.'.join(path + [name])}")

    @staticmethod
    def get_nested(config: Dict[str, Any], path: str, default: Any = None) -> Any:
        """
        取得嵌套配置值

        Example:
            fuel = ConfigLoader.get_nested(config, 'engine.fuel', 1_000_000)
        """
        obj = config
        try:
            for key in path.split('.'):
                obj = obj[key]
            return obj
        except (KeyError, TypeError):
            return default

    @staticmethod
    def load_gamma(path: str) -> Tuple[Dict[int, Any], Dict[int, Any]]:
        """
        γ 覆寫檔：gamma: {a: "<Scalar>"}, gamma_bar: {a: "<Scalar>"}

        Raises:
            ConfigError: 檔案缺少 gamma 區段或 Scalar 無法解析
        """
        from core.scalar import ScalarParseError, parse_scalar

        gamma_file = Path(path)
        if not gamma_file.exists():
            raise ConfigError(f"γ 設定檔不存在: {path}")
        with open(gamma_file, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        if 'gamma' not in data:
            raise ConfigError(f"γ 設定檔缺少 gamma 區段: {path}")

        def table(section: str) -> Dict[int, Any]:
            out = {}
            for key, text in (data.get(section) or {}).items():
                try:
                    out[int(key)] = parse_scalar(str(text))
                except (ScalarParseError, ValueError) as e:
                    raise ConfigError(f"{section}[{key}] 解析失敗: {e}") from e
            return out

        return table('gamma'), table('gamma_bar')


def parse_seed(text: Any) -> int:
    if isinstance(text, int):
        return text
    try:
        return int(str(text), 0)
    except ValueError:
        raise ConfigError(f"種子格式錯誤: {text}") from None


@dataclass
class RunConfig:
    """單次執行的完整設定（CLI 參數覆寫 YAML）"""
    command: str
    preset: str = ""
    case: str = "so"
    N: int = 3
    epsilon: int = 1
    gamma: str = "default"
    suite: str = "all"
    what: str = ""
    cache_dir: str = ".qdecouple_cache"
    report: Optional[str] = None
    jobs: int = 1
    seed: int = DEFAULT_SEED
    fuel: int = 1_000_000
    log_dir: Optional[str] = "logs"
    sampling: Dict[str, Any] = field(default_factory=dict)

    @property
    def preset_kind(self) -> str:
        return self.preset.split(":", 1)[0] if self.preset else ""

    def validate(self) -> None:
        """
        執行前驗證

        Raises:
            ConfigError
        """
        if self.jobs < 1:
            raise ConfigError(f"--jobs 必須 ≥ 1，得到 {self.jobs}")
        if self.epsilon not in (1, -1):
            raise ConfigError(f"ε 只能是 +1 或 -1，得到 {self.epsilon}")
        if self.case not in ("sl", "so"):
            raise ConfigError(f"未知的 case: {self.case}")
        kind = self.preset_kind
        if kind not in PRESET_SUITES:
            raise ConfigError(f"未知的預設: {self.preset}")
        if self.command == "verify":
            if self.suite not in SUITES:
                raise ConfigError(f"未知的套件: {self.suite}")
            if self.suite not in PRESET_SUITES[kind]:
                raise ConfigError(f"套件 {self.suite} 不適用於預設 {self.preset or '(無)'}")
        if self.command == "derive" and not self.preset:
            raise ConfigError("derive 需要 --preset")
        if self.command == "emit":
            if self.what not in EMIT_TARGETS:
                raise ConfigError(f"未知的輸出目標: {self.what}")
            if self.what in ("rules", "phi-images", "zeta-images") and not self.preset:
                raise ConfigError(f"emit {self.what} 需要 --preset")
            if self.what in ("phi-images", "zeta-images") and kind not in ("cross", "heis"):
                raise ConfigError(f"emit {self.what} 需要 cross 或 heis 預設")

    def params(self) -> Dict[str, Any]:
        """決定性參數（快取鍵與報告用）"""
        return {
            "preset": self.preset,
            "case": self.case,
            "N": self.N,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
        }
