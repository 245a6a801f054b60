"""
efcap run configuration
"""

from .config_manager import DEFAULT_CONFIG_FILE, RunConfig, RunConfigManager, load_run_config

__all__ = ["DEFAULT_CONFIG_FILE", "RunConfig", "RunConfigManager", "load_run_config"]
