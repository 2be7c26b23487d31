"""Curve descriptor loader for YAML files in the config directory."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple

import yaml  # type: ignore

from errors import ConfigError, UnsupportedSecurityLevelError


@dataclass(frozen=True)
class CurveDescriptor:
    """Static description of a pairing-friendly curve."""

    key: str
    curve_id: str
    security_level: int
    backends: Tuple[str, ...]
    scalar_bytes: int
    g1_bytes: int
    g2_bytes: int
    description: str = ""


class CurveLoader:
    """Loads curve descriptors from YAML configuration files."""

    CONFIG_DIR = Path(__file__).parent / "config"

    logger = logging.getLogger(__name__)

    @classmethod
    def load_all(cls) -> Dict[int, CurveDescriptor]:
        """Load every curve descriptor, keyed by security level.

        Returns:
            Dict[int, CurveDescriptor]: Descriptors by security level in bits.

        Raises:
            ConfigError: If the directory holds no descriptor or two files claim
                the same security level.
        """
        yaml_files = sorted(cls.CONFIG_DIR.glob("*.yaml"))
        if not yaml_files:
            raise ConfigError(f"No curve descriptors found in {cls.CONFIG_DIR}")

        curves: Dict[int, CurveDescriptor] = {}
        for yaml_file in yaml_files:
            descriptor = cls._parse(yaml_file, cls._load_yaml(yaml_file))
            if descriptor.security_level in curves:
                raise ConfigError(
                    f"Duplicate curve for security level {descriptor.security_level} "
                    f"in {yaml_file}"
                )
            curves[descriptor.security_level] = descriptor
        return curves

    @classmethod
    def load(cls, security_level: int) -> CurveDescriptor:
        """Load the descriptor configured for a security level.

        Args:
            security_level: Requested security in bits.

        Returns:
            CurveDescriptor: Matching descriptor.

        Raises:
            UnsupportedSecurityLevelError: If no descriptor matches.
        """
        curves = cls.load_all()
        if security_level not in curves:
            supported = ", ".join(str(level) for level in sorted(curves))
            raise UnsupportedSecurityLevelError(
                f"Unsupported security level {security_level} (supported: {supported})"
            )
        return curves[security_level]

    @staticmethod
    def _parse(yaml_file: Path, config: Dict[str, Any]) -> CurveDescriptor:
        try:
            return CurveDescriptor(
                key=str(config["key"]),
                curve_id=str(config["curve_id"]),
                security_level=int(config["security_level"]),
                backends=tuple(str(name) for name in config["backends"]),
                scalar_bytes=int(config["scalar_bytes"]),
                g1_bytes=int(config["g1_bytes"]),
                g2_bytes=int(config["g2_bytes"]),
                description=str(config.get("description", "")).strip(),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid curve descriptor {yaml_file}: {exc}") from exc

    @classmethod
    def _load_yaml(cls, yaml_file: Path) -> Dict[str, Any]:
        try:
            with open(yaml_file, "r") as f:
                content = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"Error loading YAML file {yaml_file}: {exc}") from exc
        if not isinstance(content, dict):
            raise ConfigError(f"Curve descriptor {yaml_file} is not a mapping")
        cls.logger.debug("Loaded curve descriptor %s", yaml_file.name)
        return content
