"""
Configuration Manager for efcap
Loads the TOML run configuration, applies command-line overrides and
derives the reproducibility artifacts written next to every result
"""

import json
import math
import hashlib
import logging
import subprocess
from dataclasses import dataclass, asdict, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import toml

from core import __version__
from core.errors import ConfigError, InvalidParamsError
from core.integrate import IntegratorConfig
from core.model import Params

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent / "efcap_config.toml"

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@dataclass
class ModelSection:
    N: int = 3
    p: float = 7.0


@dataclass
class IntegratorSection:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    theta_start: float = 1e-6
    # 0 means no step-size cap
    max_step: float = 0.0
    max_steps: int = 200_000
    method: str = "DOP853"

    def to_integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol, theta_start=self.theta_start,
                                max_step=self.max_step if self.max_step > 0 else math.inf,
                                max_steps=self.max_steps, method=self.method)


@dataclass
class ShootSection:
    Gamma: float = 1.0


@dataclass
class BranchSection:
    gamma_min: float = 1e-2
    gamma_max: float = 1e6
    points_per_decade: int = 20
    # 0 derives the count from points_per_decade
    points: int = 0
    refine_width: float = 1e-4
    dead_band: float = 1e-9
    # 0 means unset
    theta_star: float = 0.0


@dataclass
class SingularSection:
    theta0: float = 1e-4
    refinement_tol: float = 1e-6
    gammas: List[float] = field(default_factory=lambda: [1e1, 1e2, 1e3, 1e4, 1e5])
    r0_fraction: float = 0.5


@dataclass
class PhaseSection:
    gamma_bar: float = 1.0
    gamma: float = 1e8
    start_magnitude: float = 1e-6
    t_length: float = 80.0
    epsilon_fraction: float = 0.5


@dataclass
class SpectralSection:
    theta: float = 0.5 * math.pi
    lambdas: List[float] = field(default_factory=lambda: [1e2, 1e3, 1e4])
    p_list: List[float] = field(default_factory=lambda: [1.5, 1.2, 1.1, 1.05])
    sup_samples: int = 10_000
    safety_margin: float = 1e-9
    scan_theta_points: int = 31
    # eigen solves use the integrator tolerances times this factor
    eigen_tol_factor: float = 1e-2


@dataclass
class OutputSection:
    out_dir: str = "results"
    machine_digits: int = 17
    summary_digits: int = 6


@dataclass
class LoggingSection:
    log_level: str = "INFO"


@dataclass
class RunSection:
    # reserved; every command is deterministic
    seed: int = 0


@dataclass
class RunConfig:
    """Effective configuration of one efcap run"""
    model: ModelSection = field(default_factory=ModelSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    shoot: ShootSection = field(default_factory=ShootSection)
    branch: BranchSection = field(default_factory=BranchSection)
    singular: SingularSection = field(default_factory=SingularSection)
    phase: PhaseSection = field(default_factory=PhaseSection)
    spectral: SpectralSection = field(default_factory=SpectralSection)
    output: OutputSection = field(default_factory=OutputSection)
    logging: LoggingSection = field(default_factory=LoggingSection)
    run: RunSection = field(default_factory=RunSection)

    def params(self) -> Params:
        return Params(int(self.model.N), float(self.model.p))

    def integrator_config(self) -> IntegratorConfig:
        return self.integrator.to_integrator_config()

    def eigen_config(self) -> IntegratorConfig:
        return self.integrator_config().scaled(self.spectral.eigen_tol_factor)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(current: Any, value: Any, where: str) -> Any:
    """Convert ``value`` to the type of the default ``current``"""
    try:
        if isinstance(current, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(current, int):
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise TypeError
            return int(float(value))
        if isinstance(current, float):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if isinstance(current, list):
            if not isinstance(value, (list, tuple)):
                raise TypeError
            return [float(v) for v in value]
        if isinstance(current, str):
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot use {value!r} as {type(current).__name__}")
    return value


class RunConfigManager:
    """Configuration manager for efcap runs"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = str(config_file) if config_file else str(DEFAULT_CONFIG_FILE)
        self.config = RunConfig()
        self.git_sha = self._get_git_sha()

    def _get_git_sha(self) -> str:
        try:
            result = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True, check=True)
            return result.stdout.strip()[:8]
        except (subprocess.CalledProcessError, FileNotFoundError, OSError):
            return "unknown"

    def load_config(self) -> RunConfig:
        """Load the TOML file; a missing file leaves the defaults in place"""
        path = Path(self.config_file)
        if not path.exists():
            logger.warning(f"Config file {path} not found, using defaults")
            return self.config
        try:
            config_data = toml.load(str(path))
        except (toml.TomlDecodeError, OSError) as e:
            raise ConfigError(f"Error loading config {path}: {e}")
        self._update_config_from_dict(config_data)
        logger.info(f"Loaded configuration from {path} (hash {self.config_hash})")
        return self.config

    def _update_config_from_dict(self, config_data: Dict[str, Any]) -> None:
        for section_name, values in config_data.items():
            section = getattr(self.config, section_name, None)
            if section is None or not isinstance(values, dict):
                logger.warning(f"Ignoring unknown config section [{section_name}]")
                continue
            known = {f.name for f in fields(section)}
            for key, value in values.items():
                if key not in known:
                    logger.warning(f"Ignoring unknown config key {section_name}.{key}")
                    continue
                where = f"{section_name}.{key}"
                setattr(section, key, _coerce(getattr(section, key), value, where))

    def apply_overrides(self, overrides: Dict[str, Any]) -> RunConfig:
        """Apply dotted ``section.key`` overrides; None values are skipped"""
        nested: Dict[str, Dict[str, Any]] = {}
        for dotted, value in overrides.items():
            if value is None:
                continue
            section_name, _, key = dotted.partition(".")
            if not key:
                raise ConfigError(f"override {dotted!r} must look like section.key")
            section = getattr(self.config, section_name, None)
            if section is None or key not in {f.name for f in fields(section)}:
                raise ConfigError(f"unknown override {dotted!r}")
            nested.setdefault(section_name, {})[key] = value
        self._update_config_from_dict(nested)
        return self.config

    @property
    def config_hash(self) -> str:
        return self._calculate_config_hash()

    def _calculate_config_hash(self) -> str:
        config_str = json.dumps(asdict(self.config), sort_keys=True)
        return hashlib.md5(config_str.encode()).hexdigest()[:8]

    def get_deterministic_artifacts(self) -> Dict[str, Any]:
        """Provenance fields for result files; no timestamps so outputs stay byte-identical"""
        return {
            "git_sha": self.git_sha,
            "config_hash": self.config_hash,
            "version": __version__,
        }

    def save_config(self, output_file: Optional[str] = None) -> Path:
        path = Path(output_file or self.config_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            toml.dump(asdict(self.config), f)
        logger.info(f"Configuration saved to {path}")
        return path

    def validate_config(self) -> List[str]:
        """Validate configuration and return any errors"""
        errors = []
        cfg = self.config

        try:
            cfg.params()
        except InvalidParamsError as e:
            errors.append(f"model: {e}")
        try:
            cfg.integrator_config()
        except InvalidParamsError as e:
            errors.append(f"integrator: {e}")

        if not cfg.shoot.Gamma > 0:
            errors.append("shoot.Gamma must be > 0")

        branch = cfg.branch
        if not (0 < branch.gamma_min < branch.gamma_max):
            errors.append("branch: need 0 < gamma_min < gamma_max")
        if branch.points_per_decade < 1:
            errors.append("branch.points_per_decade must be >= 1")
        if branch.points < 0 or branch.points == 1:
            errors.append("branch.points must be 0 or >= 2")
        if not branch.refine_width > 0:
            errors.append("branch.refine_width must be > 0")
        if branch.dead_band < 0:
            errors.append("branch.dead_band must be >= 0")
        if not (0 <= branch.theta_star < math.pi):
            errors.append("branch.theta_star must be 0 (unset) or in (0, pi)")

        singular = cfg.singular
        if not (0 < singular.theta0 <= 1e-2):
            errors.append("singular.theta0 must be in (0, 1e-2]")
        if not singular.refinement_tol > 0:
            errors.append("singular.refinement_tol must be > 0")
        if not singular.gammas or any(g <= 0 for g in singular.gammas) or singular.gammas != sorted(singular.gammas):
            errors.append("singular.gammas must be positive and increasing")
        if not (0 < singular.r0_fraction < 1):
            errors.append("singular.r0_fraction must be in (0, 1)")

        phase = cfg.phase
        if not (phase.gamma_bar > 0 and phase.gamma > 0):
            errors.append("phase.gamma_bar and phase.gamma must be > 0")
        if not (0 < phase.start_magnitude <= 1e-6):
            errors.append("phase.start_magnitude must be in (0, 1e-6]")
        if not phase.t_length > 0:
            errors.append("phase.t_length must be > 0")
        if not (0 < phase.epsilon_fraction < 1):
            errors.append("phase.epsilon_fraction must be in (0, 1)")

        spectral = cfg.spectral
        if not (0 < spectral.theta < math.pi):
            errors.append("spectral.theta must be in (0, pi)")
        if not spectral.lambdas or any(v <= 0 for v in spectral.lambdas) or spectral.lambdas != sorted(spectral.lambdas):
            errors.append("spectral.lambdas must be positive and increasing")
        if not spectral.p_list or any(p <= 1 for p in spectral.p_list):
            errors.append("spectral.p_list entries must be > 1")
        if spectral.sup_samples < 10:
            errors.append("spectral.sup_samples must be >= 10")
        if spectral.safety_margin < 0:
            errors.append("spectral.safety_margin must be >= 0")
        if spectral.scan_theta_points < 2:
            errors.append("spectral.scan_theta_points must be >= 2")
        if not (0 < spectral.eigen_tol_factor <= 1):
            errors.append("spectral.eigen_tol_factor must be in (0, 1]")

        if not (1 <= cfg.output.machine_digits <= 17):
            errors.append("output.machine_digits must be in [1, 17]")
        if not (1 <= cfg.output.summary_digits <= 17):
            errors.append("output.summary_digits must be in [1, 17]")
        if cfg.logging.log_level.upper() not in LOG_LEVELS:
            errors.append(f"logging.log_level must be one of {LOG_LEVELS}")

        return errors


def load_run_config(config_file: Optional[str] = None) -> RunConfig:
    return RunConfigManager(config_file).load_config()
