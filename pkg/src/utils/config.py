"""
Run configuration.

Precedence, lowest first: built-in defaults, ``config.yaml`` (or the file given
with ``--config``), the ``GPFP_THREADS`` environment variable (``.env`` is read
through python-dotenv), command-line flags.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from src.models.sequences import QuadratureRule
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.yaml"
THREADS_ENV = "GPFP_THREADS"


class RunConfig(BaseModel):
    """Numeric settings shared by every subcommand."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    tol: float = 1e-10
    quad_nodes: int = 256
    max_quad_nodes: int = 65536
    probes: int = 100
    epsilon: float = 1e-2
    seed: int = 0
    output: Literal["json", "csv"] = "json"
    threads: Union[int, Literal["auto"]] = "auto"

    @field_validator("tol")
    @classmethod
    def tol_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tol must be positive")
        return v

    @field_validator("quad_nodes", "max_quad_nodes")
    @classmethod
    def enough_nodes(cls, v: int) -> int:
        if v < 8:
            raise ValueError("node counts must be at least 8")
        return v

    @field_validator("probes")
    @classmethod
    def probes_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("need at least one probe")
        return v

    @field_validator("epsilon")
    @classmethod
    def epsilon_below_half(cls, v: float) -> float:
        if not 0.0 < v < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        return v

    @field_validator("threads")
    @classmethod
    def threads_positive(cls, v):
        if v != "auto" and v < 1:
            raise ValueError("threads must be positive or 'auto'")
        return v

    def rule(self) -> QuadratureRule:
        return QuadratureRule("cosine", self.quad_nodes, self.tol, max(self.max_quad_nodes, self.quad_nodes))

    def to_file(self, path: Union[str, Path]) -> None:
        """Write as YAML; :func:`load_config` reads it back unchanged."""
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.model_dump(), f, sort_keys=True)


def _read_file(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise DomainError(f"{path}: configuration must be a mapping")
    # the shipped config.yaml keeps the run settings under ``run``
    return dict(data.get("run", data))


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    use_env: bool = True,
) -> RunConfig:
    """
    Merge the configuration sources.

    Args:
        path: YAML/JSON file; when None, ``config.yaml`` is used if present
        overrides: flag values; None entries are ignored
        use_env: read ``.env`` and ``GPFP_THREADS``

    Raises:
        DomainError: unreadable file or invalid values
    """
    values: Dict[str, Any] = {}
    source = path if path is not None else (DEFAULT_CONFIG_PATH if os.path.exists(DEFAULT_CONFIG_PATH) else None)
    if source is not None:
        if not os.path.exists(source):
            raise DomainError(f"config file not found: {source}")
        values.update(_read_file(source))
        logger.debug("configuration read from %s", source)
    if use_env:
        try:
            from dotenv import load_dotenv

            load_dotenv()
        except ImportError:
            logger.debug("python-dotenv not installed; skipping .env")
        env_threads = os.getenv(THREADS_ENV)
        if env_threads:
            try:
                values["threads"] = env_threads if env_threads == "auto" else int(env_threads)
            except ValueError as exc:
                raise DomainError(f"{THREADS_ENV} must be an integer or 'auto', got {env_threads!r}") from exc
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise DomainError(f"invalid configuration: {exc.errors()[0]['msg']}") from exc
