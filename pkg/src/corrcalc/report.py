"""Uniform verdict objects emitted by every checker."""
import json
from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class Report:
    """Verdict of a check together with the data needed to audit it.

    ``anchor`` names the statement being checked, ``witness`` carries
    positive evidence and ``counterexample`` the first failure found in
    canonical order.
    """
    check: str
    anchor: str
    holds: bool
    witness: dict = field(default_factory=dict)
    counterexample: Optional[dict] = None
    payload: Any = None

    def __bool__(self):
        return self.holds

    def to_json(self):
        return {
            "check": self.check,
            "anchor": self.anchor,
            "verdict": "holds" if self.holds else "fails",
            "witness": self.witness,
            "counterexample": self.counterexample,
        }

    def dumps(self):
        return dumps(self.to_json())


def dumps(obj):
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
