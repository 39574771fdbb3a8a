"""
重試裝飾器
共享快取目錄時，rename 偶發失敗以指數退避重試
"""

import time
from functools import wraps
from typing import Callable, Tuple, Type


def retry(
    max_attempts: int = 3,
    delay: float = 0.05,
    backoff: float = 2.0,
    exceptions: Tuple[Type[Exception], ...] = (OSError,)
) -> Callable:
    """
    重試裝飾器

    Args:
        max_attempts: 最大嘗試次數
        delay: 初始延遲（秒）
        backoff: 每次重試延遲的倍數
        exceptions: 需要重試的例外類型

    Example:
        @retry(max_attempts=3)
        def replace_file(tmp, target, logger=None):
            os.replace(tmp, target)
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            attempt = 0
            current_delay = delay
            while True:
                try:
                    return func(*args, **kwargs)
                except exceptions as e:
                    attempt += 1
                    if attempt >= max_attempts:
                        raise
                    logger = kwargs.get('logger')
                    if logger is not None:
                        logger.warning(
                            "⏳",
                            f"操作失敗，{current_delay:.2f}秒後重試 "
                            f"({attempt}/{max_attempts}): {e}"
                        )
                    time.sleep(current_delay)
                    current_delay *= backoff
        return wrapper
    return decorator
