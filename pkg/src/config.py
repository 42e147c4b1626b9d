"""
Configuration management for ncp4.
Handles loading, saving, and reading engine settings.
"""

import json
import os
from typing import Dict, Any

from dotenv import load_dotenv
from loguru import logger

from src.coefficients import MODES, RingContext


class Config:
    """Configuration management class."""

    def __init__(self, config_file: str = "ncp4.json"):
        """Initialize configuration with default values."""
        load_dotenv()
        self.config_file = config_file
        self.default_config = {
            "mode": "exact",
            "tolerance": 1e-9,
            "condition_bound": 1e12,
            "spectral_gap_threshold": 1e-8,
            "entry_range": 3,
            "log_dir": "logs",
            "log_level": "INFO",
            "file_logging": True,
        }
        self.config = self.load_config()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file or create default."""
        try:
            if os.path.exists(self.config_file):
                with open(self.config_file, "r") as f:
                    config = json.load(f)
                    # Merge with defaults to ensure all keys exist
                    merged_config = self.default_config.copy()
                    merged_config.update(config)
                    return merged_config
            else:
                return self.default_config.copy()
        except Exception as e:
            logger.warning(f"CONFIG: cannot load {self.config_file}, using defaults: {e}")
            return self.default_config.copy()

    def save_config(self) -> None:
        """Save current configuration to file."""
        try:
            with open(self.config_file, "w") as f:
                json.dump(self.config, f, indent=2)
        except Exception as e:
            logger.error(f"CONFIG: cannot save {self.config_file}: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        return self.config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set configuration value and save."""
        self.config[key] = value
        self.save_config()

    def get_mode(self) -> str:
        """Get coefficient mode (exact or float)."""
        mode = self.get("mode", "exact")
        return mode if mode in MODES else "exact"

    def get_tolerance(self) -> float:
        """Get float-mode zero tolerance."""
        return float(self.get("tolerance", 1e-9))

    def get_condition_bound(self) -> float:
        """Get the condition number above which a matrix counts as singular."""
        return float(self.get("condition_bound", 1e12))

    def get_spectral_gap_threshold(self) -> float:
        """Get the minimum admissible Sylvester spectral gap."""
        return float(self.get("spectral_gap_threshold", 1e-8))

    def get_entry_range(self) -> int:
        """Get the integer range of random matrix entries."""
        return int(self.get("entry_range", 3))

    def get_log_dir(self) -> str:
        """Get log directory."""
        return self.get("log_dir", "logs")

    def get_log_level(self) -> str:
        """Get console log level."""
        return self.get("log_level", "INFO")

    def get_file_logging(self) -> bool:
        """Whether the session log file is written."""
        return bool(self.get("file_logging", True))

    def get_threads(self) -> int:
        """Worker threads, from NCP4_THREADS (default 1)."""
        try:
            return max(1, int(os.getenv("NCP4_THREADS", "1")))
        except ValueError:
            return 1

    def scenario_defaults(self) -> Dict[str, Any]:
        """Scenario fields taken from the settings when a scenario leaves them out."""
        return {"mode": self.get_mode(), "tolerance": self.get_tolerance(), "entry_range": self.get_entry_range()}

    def ring_context(self, **overrides: Any) -> RingContext:
        """Numerical settings as a RingContext."""
        values = {
            "mode": self.get_mode(),
            "tol": self.get_tolerance(),
            "condition_bound": self.get_condition_bound(),
            "gap_threshold": self.get_spectral_gap_threshold(),
            "entry_range": self.get_entry_range(),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RingContext(**values)
