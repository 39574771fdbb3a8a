"""
核心模組
"""

from .report import CheckReport, CheckResult, CheckStatus
from .rewriting import RuleSet
from .tensor import IndexScheme
from .state_manager import RuleCache
from .hash_calculator import HashCalculator
from .verify_engine import BaseVerifyEngine, TensorVerifyEngine

__all__ = [
    'CheckReport',
    'CheckResult',
    'CheckStatus',
    'RuleSet',
    'IndexScheme',
    'RuleCache',
    'HashCalculator',
    'BaseVerifyEngine',
    'TensorVerifyEngine',
]
