"""
工具模組
"""

from .logger import VerifyLogger, LogIcons
from .retry import retry
from .config_loader import ConfigError, ConfigLoader, RunConfig

__all__ = [
    'VerifyLogger',
    'LogIcons',
    'retry',
    'ConfigError',
    'ConfigLoader',
    'RunConfig',
]
