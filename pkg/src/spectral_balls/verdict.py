"""Verdicts: the common return type of every check."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Optional


class Status(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"
    NO_VIOLATION_FOUND = "NoViolationFound"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one comparison.

    ``kind`` fixes how ``margin`` and ``error`` map to a status:

    * ``"strict"``: margin is ``rhs - lhs`` of a strict inequality. Holds iff
      ``margin > error``, Violated iff ``margin < -error``.
    * ``"nonstrict"``: same margin convention for ``<=``; Holds iff
      ``margin >= -error``, otherwise Violated.
    * ``"equality"``: margin is ``|lhs - rhs|``; Holds iff ``margin <= error``.
    * ``"inclusion"``: margin is ``1 - max level`` over the samples.
    """

    status: Status
    margin: float
    error: float
    kind: str = "strict"
    witness: Optional[tuple] = None
    provenance: dict = field(default_factory=dict)
    sub: dict = field(default_factory=dict)

    @classmethod
    def strict(cls, margin, error, **kw):
        if margin > error:
            status = Status.HOLDS
        elif margin < -error:
            status = Status.VIOLATED
        else:
            status = Status.INCONCLUSIVE
        return cls(status, float(margin), float(error), "strict", **kw)

    @classmethod
    def nonstrict(cls, margin, error, **kw):
        status = Status.HOLDS if margin >= -error else Status.VIOLATED
        return cls(status, float(margin), float(error), "nonstrict", **kw)

    @classmethod
    def equality(cls, difference, error, **kw):
        d = abs(float(difference))
        status = Status.HOLDS if d <= error else Status.VIOLATED
        return cls(status, d, float(error), "equality", **kw)

    @classmethod
    def degenerate(cls, reason, **kw):
        prov = dict(kw.pop("provenance", {}), reason=reason)
        return cls(Status.DEGENERATE, math.nan, math.nan, "descriptive", provenance=prov, **kw)

    @property
    def holds(self) -> bool:
        return self.status in (Status.HOLDS, Status.NO_VIOLATION_FOUND)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "status": self.status.value,
            "margin": _json_float(self.margin),
            "error": _json_float(self.error),
            "kind": self.kind,
            "witness": None if self.witness is None else [_plain(w) for w in self.witness],
            "provenance": _plain(self.provenance),
        }
        if self.sub:
            d["sub"] = {k: v.to_dict() for k, v in sorted(self.sub.items())}
        return d


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _plain(obj):
    """Convert numpy scalars/arrays and nested containers into JSON-ready values."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    if isinstance(obj, Verdict):
        return obj.to_dict()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj
