"""Utility functions: errors, exact numbers, configuration, explanations."""

from .errors import GPFPError
from .config import RunConfig, load_config
from .explainer import explain_fid, explain_threshold, explain_ui

__all__ = [
    "GPFPError",
    "RunConfig",
    "load_config",
    "explain_fid",
    "explain_threshold",
    "explain_ui",
]
