"""
協變 Heisenberg 代數預設
"""

from .engine import HeisenbergVerifyEngine

__all__ = [
    'HeisenbergVerifyEngine',
]
