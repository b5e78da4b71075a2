from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .exactmath import Poly, PolyMatrix


@dataclass
class VerificationResult:
    """Outcome of checking one identity.

    ``witness`` is filled in exactly when the identity fails; it holds the
    inputs and the nonzero residual in JSON-friendly form.
    """

    identity: str
    verified: bool
    trials: int = 1
    witness: dict | None = None
    stats: dict = field(default_factory=dict)
    millis: int = 0

    def __post_init__(self):
        if not self.verified and not self.witness:
            raise ValueError(f"violated result for {self.identity} needs a witness")

    @property
    def verdict(self) -> str:
        return "verified" if self.verified else "violated"

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "verdict": self.verdict,
            "trials": self.trials,
            "witness": jsonable(self.witness),
            "millis": self.millis,
            "stats": jsonable(self.stats),
        }


def jsonable(obj: Any):
    """Exact values rendered as strings, containers recursively."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, Poly):
        return obj.format()
    if isinstance(obj, PolyMatrix):
        return obj.format()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    return str(obj)
