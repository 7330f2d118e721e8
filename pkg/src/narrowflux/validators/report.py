"""Asymptotic-vs-numerical comparison records."""

from __future__ import annotations

import json
from dataclasses import dataclass

__all__ = ["OracleReport", "relative_error"]


def relative_error(asym: float, num: float) -> float:
    """Signed percent error 100 (asym - num) / num of an expansion vs a reference."""
    if num == 0.0:
        raise ZeroDivisionError("reference value is zero")
    return 100.0 * (asym - num) / num


@dataclass(frozen=True)
class OracleReport:
    """One comparison row: expansion value vs numerical oracle."""

    case: str
    eps: float
    asymptotic: float
    numeric: float
    stderr: float | None = None

    @property
    def relative_error_percent(self) -> float:
        return relative_error(self.asymptotic, self.numeric)

    def to_json(self) -> str:
        return json.dumps({
            "case": self.case,
            "eps": self.eps,
            "asym": self.asymptotic,
            "num": self.numeric,
            "re_percent": self.relative_error_percent,
            "stderr": self.stderr,
        })
