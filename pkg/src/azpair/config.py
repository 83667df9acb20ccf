"""Run configuration shared by the library entry points and the CLI."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    """Everything that can change a numerical result.

    ``beta`` overrides the automatic choice of base point (an "a/b" string).
    """

    seed: int = 42
    samples: int = 20_000
    depth: int = 30
    n_max: int = 10
    clip_eps: float = 1e-9
    tol: float = 1e-8
    output_format: str = "json"
    beta: Optional[str] = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("samples", "depth", "n_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.clip_eps < 1:
            raise ValueError("clip_eps must lie in (0, 1)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")

    def to_dict(self) -> dict:
        return asdict(self)
