"""
歐氏量子空間與交叉積預設
"""

from .engine import EuclidVerifyEngine, KIND_CROSS, KIND_EUCLID

__all__ = [
    'EuclidVerifyEngine',
    'KIND_CROSS',
    'KIND_EUCLID',
]
