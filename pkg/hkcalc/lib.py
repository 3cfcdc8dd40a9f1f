import functools
import os
import sys
from functools import lru_cache
from pathlib import Path
from typing import Optional

import psutil
import yaml
from contextlog import get_logger


_TEMPLATE_CONTEXT_PATH: Optional[str] = None  # defaults to hkcalc/configs/context.yml

# environment variable -> context key
_ENV_OVERRIDES = {
    "HK_ORACLE_BUDGET": "oracle_budget",
    "HK_ENUMERATION_BUDGET": "enumeration_budget",
    "HK_THREADS": "threads",
}


def catch_ctrl_c(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            get_logger().error("Got Ctrl+C, exiting")
            sys.exit(127)

    return wrapper


def get_template_context_path() -> str:
    if _TEMPLATE_CONTEXT_PATH is None:
        set_template_context_path(str(Path(sys.modules["hkcalc"].__file__).parent / "configs/context.yml"))
    return _TEMPLATE_CONTEXT_PATH


def set_template_context_path(path: str) -> None:
    global _TEMPLATE_CONTEXT_PATH  # pylint: disable=global-statement
    _TEMPLATE_CONTEXT_PATH = path


def get_context_path() -> str:
    return str(Path(os.getenv("HK_CONTEXT_CONFIG_PATH", get_template_context_path())).expanduser().absolute())


@lru_cache(maxsize=1)
def get_context() -> dict:
    with open(get_context_path()) as f:
        res = dict(yaml.safe_load(f) or {})
    for env_name, key in _ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value not in (None, ""):
            res[key] = int(value)
    return res


def worker_count(threads: Optional[int] = None) -> int:
    """Configured worker count; 0 means one per physical core"""
    if threads is None:
        threads = get_context().get("threads", 0)
    if threads > 0:
        return threads
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
