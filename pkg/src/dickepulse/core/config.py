"""
Configuration management for dickepulse
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Any, Optional
import logging

import yaml


@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file_path: Optional[str] = None
    max_file_size: str = "10MB"
    backup_count: int = 5
    console_output: bool = True


@dataclass
class SystemDefaults:
    """Physical defaults applied when the command line does not override them"""
    lamb_dicke: float = 0.0
    trap_frequency: float = 4.0e6  # rad/s


@dataclass
class SearchSettings:
    """Multistart optimizer settings"""
    n_restarts: Optional[int] = None  # None: budget chosen from the ion count
    fidelity_goal: float = 0.999
    max_iterations: int = 500
    gradient_step: float = 1e-6  # units of pi
    convergence_tol: float = 1e-9
    area_min: float = 0.0
    area_max: float = 2.0
    seed: int = 2011
    workers: int = 1
    biased_starts: bool = True  # simplex starts scaled to the area-scaling bound


@dataclass
class RobustnessSettings:
    """Monte-Carlo perturbation sweep settings"""
    sigmas: List[float] = field(default_factory=lambda: [0.0, 0.005, 0.01, 0.02])
    trials: int = 1000
    seed: int = 7
    mode: str = "relative_area_absolute_phase"
    workers: int = 1


@dataclass
class OracleSettings:
    """Full Hilbert-space oracle settings"""
    phonon_buffer: int = 4  # cutoff is n_ions + phonon_buffer
    discrepancy_tol: float = 1e-8
    leakage_tol: float = 1e-9


@dataclass
class TimingSettings:
    """Duration estimate settings"""
    coupling_fraction: float = 0.1  # g = coupling_fraction * trap_frequency


@dataclass
class OutputSettings:
    """Where result files go when no explicit path is given"""
    directory: str = "results"


_SECTIONS = {
    "logging": LoggingConfig,
    "system": SystemDefaults,
    "search": SearchSettings,
    "robustness": RobustnessSettings,
    "oracle": OracleSettings,
    "timing": TimingSettings,
    "output": OutputSettings,
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _type_errors(config: "Config") -> List[str]:
    """Fields whose YAML value does not have the type of the field default"""
    errors = []
    for section_name, section_cls in _SECTIONS.items():
        defaults = section_cls()
        section = getattr(config, section_name)
        for key, default in vars(defaults).items():
            value = getattr(section, key)
            if default is None:
                # Optional fields: file_path is a string, n_restarts an integer
                ok = value is None or (isinstance(value, str) if key == "file_path"
                                       else isinstance(value, int) and not isinstance(value, bool))
            elif isinstance(default, bool):
                ok = isinstance(value, bool)
            elif isinstance(default, int):
                ok = isinstance(value, int) and not isinstance(value, bool)
            elif isinstance(default, float):
                ok = _is_number(value)
            elif isinstance(default, list):
                ok = isinstance(value, list) and all(_is_number(v) for v in value)
            else:
                ok = isinstance(value, type(default))
            if not ok:
                errors.append(f"{section_name}.{key} has the wrong type: {value!r}")
    return errors


@dataclass
class Config:
    """Main dickepulse configuration"""
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    system: SystemDefaults = field(default_factory=SystemDefaults)
    search: SearchSettings = field(default_factory=SearchSettings)
    robustness: RobustnessSettings = field(default_factory=RobustnessSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    timing: TimingSettings = field(default_factory=TimingSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @classmethod
    def load(cls, config_path: Path) -> "Config":
        """Load configuration from YAML file"""
        config_path = Path(config_path)
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, "r") as f:
            data = yaml.safe_load(f) or {}

        if not isinstance(data, dict):
            raise ValueError(f"Configuration root must be a mapping: {config_path}")

        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Create Config from dictionary; unknown keys are ignored"""
        config = cls()

        for section_name in _SECTIONS:
            if section_name not in data or not data[section_name]:
                continue
            section = getattr(config, section_name)
            for key, value in data[section_name].items():
                if hasattr(section, key):
                    setattr(section, key, value)

        return config

    def to_dict(self) -> Dict[str, Any]:
        """Convert Config to dictionary"""
        result: Dict[str, Any] = {}
        for section_name in _SECTIONS:
            section = getattr(self, section_name)
            result[section_name] = {
                key: (list(value) if isinstance(value, (list, tuple)) else value)
                for key, value in vars(section).items()
            }
        return result

    def save(self, config_path: Path) -> None:
        """Save configuration to YAML file"""
        config_path = Path(config_path)
        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, "w") as f:
            yaml.dump(self.to_dict(), f, default_flow_style=False, indent=2, sort_keys=False)

    @classmethod
    def create_default(cls) -> "Config":
        """Create a default configuration"""
        return cls()

    def validate(self) -> List[str]:
        """
        Validate configuration values

        Returns:
            List of validation errors (empty if valid)
        """
        # Imported here: robustness imports the chain model, which is not needed
        # for loading a config file.
        from .robustness import NoiseMode

        errors = _type_errors(self)
        if errors:
            return errors

        if not isinstance(logging.getLevelName(str(self.logging.level).upper()), int):
            errors.append(
                "logging.level must be one of: DEBUG, INFO, WARNING, ERROR, CRITICAL"
            )

        search = self.search
        if not 0.0 < search.fidelity_goal <= 1.0:
            errors.append("search.fidelity_goal must lie in (0, 1]")
        if search.area_min < 0.0:
            errors.append("search.area_min must be non-negative")
        if search.area_max <= search.area_min:
            errors.append("search.area_max must exceed search.area_min")
        if search.gradient_step <= 0.0:
            errors.append("search.gradient_step must be positive")
        if search.convergence_tol <= 0.0:
            errors.append("search.convergence_tol must be positive")
        if search.max_iterations < 0:
            errors.append("search.max_iterations must be non-negative")
        if search.n_restarts is not None and search.n_restarts < 1:
            errors.append("search.n_restarts must be at least 1")
        if search.workers < 1:
            errors.append("search.workers must be at least 1")

        if self.system.lamb_dicke < 0.0:
            errors.append("system.lamb_dicke must be non-negative")
        if self.system.trap_frequency <= 0.0:
            errors.append("system.trap_frequency must be positive")

        robustness = self.robustness
        if any(sigma < 0.0 for sigma in robustness.sigmas):
            errors.append("robustness.sigmas must be non-negative")
        if robustness.trials < 1:
            errors.append("robustness.trials must be at least 1")
        if robustness.workers < 1:
            errors.append("robustness.workers must be at least 1")
        valid_modes = [mode.value for mode in NoiseMode]
        if robustness.mode not in valid_modes:
            errors.append(f"robustness.mode must be one of: {', '.join(valid_modes)}")

        if self.oracle.phonon_buffer < 0:
            errors.append("oracle.phonon_buffer must be non-negative")

        if not 0.0 < self.timing.coupling_fraction <= 1.0:
            errors.append("timing.coupling_fraction must lie in (0, 1]")

        return errors
