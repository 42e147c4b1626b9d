"""
Report records and their json-lines / human renderings.
"""

import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, TextIO

RECORD_FIELDS = (
    "check_id",
    "paper_anchor",
    "vanishing_order",
    "max_residual",
    "pass",
    "seconds",
    "inputs_digest",
    "reliable_order",
    "residual_by_order",
    "first_nonzero",
    "error",
)

FORMATS = ("json-lines", "human")


@dataclass
class CheckRecord:
    """One executed check. `paper_anchor` names the identity the check verifies."""

    check_id: str
    paper_anchor: str
    inputs_digest: str
    passed: bool = False
    vanishing_order: Optional[int] = None
    max_residual: Any = None
    seconds: Optional[float] = None
    reliable_order: Optional[int] = None
    residual_by_order: List[Any] = field(default_factory=list)
    first_nonzero: Optional[Dict[str, Any]] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Fields in the documented order."""
        values = {
            "check_id": self.check_id,
            "paper_anchor": self.paper_anchor,
            "vanishing_order": self.vanishing_order,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "seconds": self.seconds,
            "inputs_digest": self.inputs_digest,
            "reliable_order": self.reliable_order,
            "residual_by_order": self.residual_by_order,
            "first_nonzero": self.first_nonzero,
            "error": self.error,
        }
        return {k: values[k] for k in RECORD_FIELDS}


@dataclass
class Report:
    """Records sorted by check id; every executed check appears once."""

    records: List[CheckRecord] = field(default_factory=list)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.check_id)
        seen = set()
        for r in self.records:
            if r.check_id in seen:
                raise ValueError(f"duplicate check id {r.check_id!r}")
            seen.add(r.check_id)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> Dict[str, int]:
        return {"total": len(self.records), "passed": len(self.records) - len(self.failures), "failed": len(self.failures)}


def render_json_lines(report: Report) -> Iterable[str]:
    for record in report.records:
        yield json.dumps(record.to_dict(), separators=(", ", ": "))


def render_human(report: Report) -> Iterable[str]:
    if not report.records:
        return
    width = max(len(r.check_id) for r in report.records)
    for r in report.records:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.check_id:<{width}}  vanishing={r.vanishing_order}  max={r.max_residual}"
        if r.seconds is not None:
            line += f"  {r.seconds:.3f}s"
        if r.error:
            line += f"  error={r.error}"
        elif not r.passed and r.first_nonzero:
            line += f"  first_nonzero={r.first_nonzero}"
        yield line
    s = report.summary()
    yield f"{s['passed']}/{s['total']} checks passed"


def emit_report(report: Report, fmt: str = "json-lines", out: Optional[str] = None, stream: TextIO = None) -> int:
    """Write the report to `out` (or stdout) and return the exit code."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {list(FORMATS)}")
    lines = list(render_json_lines(report) if fmt == "json-lines" else render_human(report))
    text = "".join(line + "\n" for line in lines)
    if out:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, "w") as f:
            f.write(text)
    else:
        target = stream or sys.stdout
        target.write(text)
        target.flush()
    return report.exit_code()
