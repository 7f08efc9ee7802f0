"""Engine configuration and the plain-text files it can be loaded from."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field, replace
from importlib.resources import files
from pathlib import Path
from typing import Optional

from .docmodel import DEFAULT_ZONE_PATTERNS, load_patterns
from .formula_match import MatchMode
from .mathparse import NormalizationTable
from .text_match import StopTermDictionary

CONFIG_ENV = "SIMDEX_CONFIG"
WEIGHT_BAND = (5.0, 10.0)


def _read_lines(path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def default_stop_terms() -> StopTermDictionary:
    text = files("simdex").joinpath("data/stop_terms.txt").read_text("utf-8")
    return StopTermDictionary.from_lines(text.splitlines())


@dataclass(frozen=True)
class EngineConfig:
    min_run: int = 8
    weight_ratio: float = 7.0
    mode: MatchMode = MatchMode.STRICT
    stop_terms: StopTermDictionary = field(default_factory=default_stop_terms)
    zone_patterns: tuple[str, ...] = DEFAULT_ZONE_PATTERNS
    normalization: NormalizationTable = field(default_factory=NormalizationTable.default)

    def __post_init__(self):
        if self.min_run < 1:
            raise ValueError("min_run must be at least 1")
        if self.weight_ratio <= 0:
            raise ValueError("weight_ratio must be positive")
        lo, hi = WEIGHT_BAND
        if not lo <= self.weight_ratio <= hi:
            warnings.warn(f"formula/text weight ratio {self.weight_ratio} is outside "
                          f"the recommended band [{lo:g}, {hi:g}]", stacklevel=3)


def read_flat_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` comments; keys use dashes or underscores."""
    out: dict[str, str] = {}
    for n, raw in enumerate(_read_lines(path), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def env_config() -> dict[str, str]:
    path = os.environ.get(CONFIG_ENV)
    return read_flat_config(path) if path else {}


def build_config(min_run: Optional[int] = None, weight_ratio: Optional[float] = None,
                 mode: Optional[str] = None, stop_terms: Optional[str] = None,
                 exclude_zones: Optional[str] = None,
                 normalization: Optional[str] = None) -> EngineConfig:
    """Assemble a config; file arguments are paths, ``None`` keeps the default."""
    cfg = EngineConfig()
    changes: dict = {}
    if min_run is not None:
        changes["min_run"] = int(min_run)
    if weight_ratio is not None:
        changes["weight_ratio"] = float(weight_ratio)
    if mode is not None:
        changes["mode"] = MatchMode(mode)
    if stop_terms is not None:
        changes["stop_terms"] = StopTermDictionary.from_lines(_read_lines(stop_terms))
    if exclude_zones is not None:
        changes["zone_patterns"] = load_patterns(_read_lines(exclude_zones))
    if normalization is not None:
        changes["normalization"] = NormalizationTable.from_lines(_read_lines(normalization))
    return replace(cfg, **changes) if changes else cfg
