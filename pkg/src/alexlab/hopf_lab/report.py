"""Common report shape for the PDE-side checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class Hypothesis:
    id: str
    status: str  # holds | fails | n/a
    margin: float = math.nan
    note: str = ""

    def to_dict(self) -> dict:
        d = {"id": self.id, "status": self.status, "margin": _num(self.margin)}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class CheckReport:
    name: str
    hypotheses: list[Hypothesis] = field(default_factory=list)
    conclusion: str = ""
    fitted_constants: dict = field(default_factory=dict)
    samples: int = 0
    details: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)  # name -> (header, rows), written as CSV

    def add(self, id_: str, ok: bool | None, margin: float = math.nan, note: str = "") -> Hypothesis:
        h = Hypothesis(id_, "n/a" if ok is None else ("holds" if ok else "fails"), float(margin), note)
        self.hypotheses.append(h)
        return h

    def status(self, id_: str) -> str:
        for h in self.hypotheses:
            if h.id == id_:
                return h.status
        raise KeyError(id_)

    @property
    def broken(self) -> list[str]:
        return [h.id for h in self.hypotheses if h.status == "fails"]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "conclusion": self.conclusion,
            "fitted_constants": {k: _num(v) for k, v in self.fitted_constants.items()},
            "samples": self.samples,
            "details": self.details,
        }


def _num(x):
    """JSON has no inf/nan; encode them as strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x
