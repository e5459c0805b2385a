# tests/test_config.py

import pytest

from src.mmebench.config import Config


def test_defaults(monkeypatch):
    """Unset variables fall back to the documented defaults."""
    for name in ("MMEBENCH_SEED", "MMEBENCH_DEGENERACY_TOLERANCE", "MMEBENCH_WORKERS",
                 "MMEBENCH_COMPENSATED_SUMMATION"):
        monkeypatch.delenv(name, raising=False)
    settings = Config()
    assert settings.SEED == 0
    assert settings.DEGENERACY_TOLERANCE == 1e-12
    assert settings.WORKERS == 1
    assert settings.COMPENSATED_SUMMATION is False
    settings.validate()


def test_environment_overrides(monkeypatch):
    """MMEBENCH_* variables are read at construction."""
    monkeypatch.setenv("MMEBENCH_SEED", "42")
    monkeypatch.setenv("MMEBENCH_COMPENSATED_SUMMATION", "yes")
    settings = Config()
    assert settings.SEED == 42
    assert settings.COMPENSATED_SUMMATION is True


@pytest.mark.parametrize("name, value", [("MMEBENCH_DEGENERACY_TOLERANCE", "1.5"),
                                         ("MMEBENCH_POWER_ITERATIONS", "0"),
                                         ("MMEBENCH_SEED", "-1"),
                                         ("MMEBENCH_WORKERS", "0")])
def test_invalid_values_fail_validation(monkeypatch, name, value):
    """Out-of-range settings are refused by validate()."""
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        Config().validate()
