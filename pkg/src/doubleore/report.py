"""Certification reports shared by every checker."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive-at-bound"
UNSUPPORTED = "unsupported"

VERDICTS = (PASS, FAIL, INCONCLUSIVE, UNSUPPORTED)


@dataclass
class CertReport:
    """Outcome of one check.

    ``witnesses`` hold JSON-ready dicts (offending overlap, degree, residual
    rendered canonically).  ``details`` carries check-specific data such as
    Hilbert counts.  ``elapsed`` is wall time and is kept out of the verdict
    body so serialized reports are byte-stable.
    """

    check: str
    verdict: str
    bound: int | None = None
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    elapsed: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witnesses:
            raise ValueError(f"{self.check}: a failing report needs a witness")
        if self.verdict == INCONCLUSIVE and self.bound is None:
            raise ValueError(f"{self.check}: an inconclusive report must state its bound")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.check, "verdict": self.verdict}
        if self.bound is not None:
            out["bound"] = self.bound
        out["witnesses"] = self.witnesses
        if self.details:
            out["details"] = self.details
        if self.notes:
            out["notes"] = self.notes
        return out

    def summary(self) -> str:
        head = f"[{self.verdict.upper()}] {self.check}"
        if self.bound is not None:
            head += f" (bound {self.bound})"
        return head


def combine(check: str, parts: list[CertReport], bound: int | None = None,
            details: dict | None = None) -> CertReport:
    """Fold sub-reports: fail dominates, then unsupported, then inconclusive."""
    witnesses = []
    for p in parts:
        if p.verdict == FAIL:
            for w in p.witnesses:
                witnesses.append({"subcheck": p.check, **w})
    verdicts = {p.verdict for p in parts}
    if FAIL in verdicts:
        verdict = FAIL
    elif UNSUPPORTED in verdicts:
        verdict = UNSUPPORTED
    elif INCONCLUSIVE in verdicts:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    if bound is None and verdict == INCONCLUSIVE:
        bound = max(p.bound for p in parts if p.bound is not None)
    d = {"subchecks": [p.to_dict() for p in parts]}
    if details:
        d.update(details)
    return CertReport(check, verdict, bound=bound, witnesses=witnesses, details=d)


def dumps(reports: list[CertReport]) -> str:
    return json.dumps({"reports": [r.to_dict() for r in reports]}, indent=2, sort_keys=True) + "\n"
