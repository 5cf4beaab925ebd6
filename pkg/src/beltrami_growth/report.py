"""CSV emission and run summaries."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field

__all__ = ["format_value", "emit_csv", "RunSummary"]


def format_value(v) -> str:
    """Twelve significant digits; booleans become 0/1."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    s = f"{v:.12g}"
    return "0" if s == "-0" else s


def emit_csv(path, columns, rows) -> str:
    """Write a header and one record per row, ``\\n``-terminated, atomically.

    Every value must be numeric and finite.
    """
    rows = list(rows)
    if not rows:
        raise ValueError(f"refusing to write {path}: report has no rows")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row {row!r} does not match columns {columns!r}")
        for v in row:
            if not math.isfinite(float(v)):
                raise ValueError(f"refusing to write {path}: non-finite value in row {row!r}")
    text = ",".join(columns) + "\n" + "".join(",".join(format_value(v) for v in row) + "\n" for row in rows)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


@dataclass
class RunSummary:
    scenario: str
    checks_run: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    def record(self, ok: bool, label: str) -> bool:
        self.checks_run += 1
        if ok:
            self.passes += 1
        else:
            self.failures.append(label)
        return ok

    def merge(self, other: "RunSummary") -> None:
        self.checks_run += other.checks_run
        self.passes += other.passes
        self.failures.extend(other.failures)
        self.artifacts.extend(other.artifacts)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"{status} {self.scenario}: {self.checks_run} checks, {self.passes} passed, "
                f"{len(self.failures)} failed ({self.wall_time:.2f} s)")
