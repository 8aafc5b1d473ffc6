from __future__ import annotations

import functools
from time import perf_counter
from typing import Any, Callable, TypeVar, cast

from loguru import logger

F = TypeVar("F", bound=Callable[..., Any])


def timer(func: F) -> F:
    """
    Handy decorator for logging the time required by a function to execute
    Description:
        - Decorate long-running operations (training, ablation, gradient suites)
        - Elapsed seconds are logged at DEBUG; the wrapped function's result is returned unchanged
    Use:
        >>> from mdetpy.utils import timer
        >>> @timer
        ... def a():
        ...     return 42
        ...
        >>> a()
        42
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            elapsed = perf_counter() - start_time
            logger.debug("Time taken by {name} is [{time:.3f}] sec", name=func.__qualname__, time=elapsed)

    return cast(F, wrapper)
