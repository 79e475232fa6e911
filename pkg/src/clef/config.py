"""Runtime configuration: a JSON config file with per-flag overrides.

The config file path comes from ``--config`` or the ``CLEF_CONFIG``
environment variable; explicit command-line flags always win over file
values.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .judge import CompilerConfig


@dataclass
class Config:
    compiler_cmd: tuple[str, ...] = ("gcc",)
    compiler_flags: tuple[str, ...] = ("-O2", "-std=c99", "-w")
    link_flags: tuple[str, ...] = ("-lm",)
    cf_weight: float = 10
    budget: int = 1000
    var_align_cap: int = 64
    combo_arity_cap: int = 3
    combo_site_cap: int = 64
    split_seed: int = 0
    split_ratio: float = 0.8
    parallelism: int = 1

    def __post_init__(self):
        if self.cf_weight < 1:
            raise ValueError("cf_weight must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not 0 < self.split_ratio < 1:
            raise ValueError("split_ratio must be in (0, 1)")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    def compiler(self) -> CompilerConfig:
        return CompilerConfig(
            tuple(self.compiler_cmd), tuple(self.compiler_flags), tuple(self.link_flags)
        )


def load_config(path: Optional[str] = None) -> Config:
    """Build a Config from a JSON file, the CLEF_CONFIG env var, or defaults."""
    if path is None:
        path = os.environ.get("CLEF_CONFIG")
    if not path:
        return Config()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("compiler_cmd", "compiler_flags", "link_flags"):
        if key in data:
            data[key] = tuple(data[key])
    return Config(**data)
