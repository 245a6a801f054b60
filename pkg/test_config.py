"""
Tests for efcap configuration
TOML loading, overrides, validation and the deterministic config hash
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__)))

import math

import pytest

from config import DEFAULT_CONFIG_FILE, RunConfigManager, load_run_config
from core.errors import ConfigError


def test_packaged_defaults():
    config = load_run_config()
    assert config.model.N == 3 and config.model.p == 7.0
    assert math.isinf(config.integrator_config().max_step)
    assert config.integrator_config().rel_tol == 1e-10
    assert config.singular.gammas == [1e1, 1e2, 1e3, 1e4, 1e5]
    assert config.spectral.theta == pytest.approx(math.pi / 2)


def test_defaults_validate():
    manager = RunConfigManager(DEFAULT_CONFIG_FILE)
    manager.load_config()
    assert manager.validate_config() == []


def test_hash_is_deterministic():
    first = RunConfigManager()
    first.load_config()
    second = RunConfigManager()
    second.load_config()
    assert first.config_hash == second.config_hash
    assert len(first.config_hash) == 8
    int(first.config_hash, 16)


def test_overrides_change_hash():
    manager = RunConfigManager()
    manager.load_config()
    before = manager.config_hash
    manager.apply_overrides({"model.N": 5, "model.p": 4.0, "branch.points": None})
    assert manager.config.params().N == 5
    assert manager.config.branch.points == 0
    assert manager.config_hash != before


def test_unknown_override_rejected():
    manager = RunConfigManager()
    with pytest.raises(ConfigError):
        manager.apply_overrides({"model.q": 1.0})
    with pytest.raises(ConfigError):
        manager.apply_overrides({"N": 3})


def test_bad_type_rejected():
    manager = RunConfigManager()
    with pytest.raises(ConfigError):
        manager.apply_overrides({"model.N": 3.5})
    with pytest.raises(ConfigError):
        manager.apply_overrides({"spectral.lambdas": 10.0})


def test_validation_reports_errors():
    manager = RunConfigManager()
    manager.apply_overrides({"model.N": 2, "branch.gamma_min": 10.0, "branch.gamma_max": 1.0,
                             "logging.log_level": "LOUD"})
    errors = manager.validate_config()
    assert any(e.startswith("model:") for e in errors)
    assert any("gamma_min" in e for e in errors)
    assert any("log_level" in e for e in errors)


def test_eigen_tolerances_follow_integrator():
    manager = RunConfigManager()
    manager.load_config()
    assert manager.config.eigen_config().rel_tol == pytest.approx(1e-12)
    manager.apply_overrides({"integrator.rel_tol": 1e-8, "integrator.abs_tol": 1e-10})
    eigen = manager.config.eigen_config()
    assert eigen.rel_tol == pytest.approx(1e-10)
    assert eigen.abs_tol == pytest.approx(1e-12)
    manager.apply_overrides({"spectral.eigen_tol_factor": 0.0})
    assert any("eigen_tol_factor" in e for e in manager.validate_config())


def test_malformed_file(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[model\nN = 3\n")
    with pytest.raises(ConfigError):
        RunConfigManager(str(path)).load_config()


def test_missing_file_keeps_defaults(tmp_path):
    config = RunConfigManager(str(tmp_path / "absent.toml")).load_config()
    assert config.model.N == 3


def test_unknown_keys_are_ignored(tmp_path):
    path = tmp_path / "extra.toml"
    path.write_text("[model]\nN = 4\ncolour = 'blue'\n\n[plotting]\ndpi = 300\n")
    config = RunConfigManager(str(path)).load_config()
    assert config.model.N == 4


def test_save_and_reload(tmp_path):
    manager = RunConfigManager()
    manager.load_config()
    manager.apply_overrides({"model.p": 9.0, "branch.theta_star": 2.5})
    saved = manager.save_config(str(tmp_path / "run.toml"))
    reloaded = RunConfigManager(str(saved))
    reloaded.load_config()
    assert reloaded.config_hash == manager.config_hash
    artifacts = reloaded.get_deterministic_artifacts()
    assert set(artifacts) == {"git_sha", "config_hash", "version"}
