"""Data models for the toolkit."""

from .partition import NCPartition
from .sequences import CumulantSeq, MomentValue, QuadratureRule
from .distribution import ExactForm, GPFPSpec, PowerSpec
from .analysis_result import FIDReport, HankelWitness, ThresholdResult, UIReport

__all__ = [
    "NCPartition",
    "CumulantSeq",
    "MomentValue",
    "QuadratureRule",
    "ExactForm",
    "GPFPSpec",
    "PowerSpec",
    "FIDReport",
    "HankelWitness",
    "ThresholdResult",
    "UIReport",
]
