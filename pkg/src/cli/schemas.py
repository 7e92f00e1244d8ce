"""
Pydantic models for the JSON files the command line reads.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from src.core.dist_core import spec_from_dict
from src.models.distribution import GPFPSpec
from src.utils.errors import DomainError
from src.utils.numbers import to_exact

WEIGHT_RTOL = 1e-9


class ExactBlock(BaseModel):
    p:       str
    scale:   str = "1"
    weights: List[str]

    @field_validator("p", "scale", mode="before")
    @classmethod
    def as_text(cls, v: Union[str, int, float]) -> str:
        return str(v)

    @field_validator("weights", mode="before")
    @classmethod
    def weights_as_text(cls, v) -> List[str]:
        return [str(w) for w in v]


class SpecFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a:     float
    b:     float
    alpha: List[float]
    l:     List[float]
    norm:  Optional[float] = None
    exact: Optional[ExactBlock] = None
    label: str = ""

    @field_validator("alpha", "l")
    @classmethod
    def non_empty(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("must list at least one term")
        return v

    @model_validator(mode="after")
    def exact_weights_match_alpha(self) -> "SpecFile":
        """Each exact weight w_k must equal 2 pi norm alpha_k (norm 1 for a raw spec)."""
        if self.exact is None:
            return self
        if len(self.exact.weights) != len(self.alpha):
            raise ValueError(
                f"exact block has {len(self.exact.weights)} weights for {len(self.alpha)} terms"
            )
        norm = 1.0 if self.norm is None else self.norm
        for k, (w, alpha) in enumerate(zip(self.exact.weights, self.alpha)):
            weight, expected = float(to_exact(w)), 2.0 * math.pi * norm * alpha
            if abs(weight - expected) > WEIGHT_RTOL * abs(weight):
                raise ValueError(f"exact weight {w} does not match 2 pi norm alpha_{k + 1} = {expected!r}")
        return self

    def to_spec(self) -> GPFPSpec:
        """Build the spec; a null norm is filled in by normalization."""
        data = self.model_dump()
        if self.exact is None:
            data.pop("exact")
        return spec_from_dict(data)


def load_spec_file(path: Union[str, Path]) -> GPFPSpec:
    """
    Read and validate a spec file.

    Raises:
        DomainError: missing file, malformed JSON or invalid fields
        NormalizationError: a raw spec that cannot be normalized
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise DomainError(f"cannot read spec file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        model = SpecFile.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "spec"
        raise DomainError(f"{path}: {where}: {first['msg']}") from exc
    spec = model.to_spec()
    if not spec.label:
        spec = spec.with_label(Path(path).stem)
    return spec
