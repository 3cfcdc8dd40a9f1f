import pytest
from hypothesis import HealthCheck, settings

from hkcalc import lib


settings.register_profile("hkcalc", suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("hkcalc")


@pytest.fixture(autouse=True)
def hk_env(monkeypatch):
    monkeypatch.setenv("HK_FORCE_COLOR", "1")
    monkeypatch.setenv("HK_THREADS", "1")
    lib.get_context.cache_clear()
    yield
    lib.get_context.cache_clear()
