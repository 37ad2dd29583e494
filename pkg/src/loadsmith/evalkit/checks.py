"""Deterministic artifact checks used by the scenario runner.

Each check returns a :class:`CheckResult` with status "pass" or "fail";
problems on the reference side (missing or unparseable expected data) raise
instead, because a broken reference invalidates the repetition rather than
failing the subject.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import LoadsmithError


@dataclass(frozen=True)
class CheckResult:
    kind: str
    status: str  # "pass" | "fail"
    diffs: tuple[str, ...] = field(default_factory=tuple)
    rationale: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "status": self.status}
        if self.diffs:
            out["diffs"] = list(self.diffs)
        if self.rationale is not None:
            out["rationale"] = self.rationale
        return out


class ReferenceError(LoadsmithError):
    """The check's own reference data is unusable (infrastructure, not a fail)."""

    def __init__(self, message: str):
        super().__init__(message, code="REFERENCE_ERROR")


def _load_reference_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ReferenceError(f"reference file missing: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ReferenceError(f"reference file {path} is not valid JSON: {exc.msg}") from exc


def _walk_numeric_diffs(actual, reference, abs_tol, rel_tol, path, diffs):
    if isinstance(reference, dict):
        if not isinstance(actual, dict):
            diffs.append(f"{path}: expected object, got {type(actual).__name__}")
            return
        for key in reference:
            if key not in actual:
                diffs.append(f"{path}.{key}: missing in actual")
            else:
                _walk_numeric_diffs(
                    actual[key], reference[key], abs_tol, rel_tol, f"{path}.{key}", diffs
                )
        for key in actual:
            if key not in reference:
                diffs.append(f"{path}.{key}: unexpected key in actual")
    elif isinstance(reference, list):
        if not isinstance(actual, list):
            diffs.append(f"{path}: expected array, got {type(actual).__name__}")
            return
        if len(actual) != len(reference):
            diffs.append(f"{path}: length {len(actual)} != expected {len(reference)}")
            return
        for i, (a, r) in enumerate(zip(actual, reference)):
            _walk_numeric_diffs(a, r, abs_tol, rel_tol, f"{path}[{i}]", diffs)
    elif isinstance(reference, bool) or reference is None or isinstance(reference, str):
        if actual != reference:
            diffs.append(f"{path}: {actual!r} != expected {reference!r}")
    elif isinstance(reference, (int, float)):
        if isinstance(actual, bool) or not isinstance(actual, (int, float)):
            diffs.append(f"{path}: expected number, got {actual!r}")
        elif abs(actual - reference) > max(abs_tol, rel_tol * abs(reference)):
            diffs.append(f"{path}: {actual!r} != expected {reference!r}")
    else:
        diffs.append(f"{path}: unsupported reference value {reference!r}")


def numeric_file_compare(
    actual: str | Path,
    reference: str | Path,
    abs_tol: float = 0.0,
    rel_tol: float = 0.0,
) -> CheckResult:
    """Structurally compare two JSON files with numeric tolerances.

    Keys must match exactly; every numeric leaf must satisfy
    |actual - ref| <= max(abs_tol, rel_tol * |ref|). A missing or
    unparseable actual file is a failing verdict (that is the subject's
    output); a broken reference raises :class:`ReferenceError`.
    """
    if abs_tol < 0 or rel_tol < 0:
        raise ValueError("tolerances must be >= 0")
    reference = Path(reference)
    actual = Path(actual)
    ref_data = _load_reference_json(reference)
    try:
        actual_data = json.loads(actual.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return CheckResult("numeric_file_compare", "fail", (f"actual file missing: {actual}",))
    except json.JSONDecodeError as exc:
        return CheckResult(
            "numeric_file_compare", "fail", (f"actual file is not valid JSON: {exc.msg}",)
        )

    diffs: list[str] = []
    _walk_numeric_diffs(actual_data, ref_data, abs_tol, rel_tol, "$", diffs)
    status = "pass" if not diffs else "fail"
    return CheckResult("numeric_file_compare", status, tuple(diffs))


def file_set_check(directory: str | Path, expected: list[str]) -> CheckResult:
    """Exact file-name set comparison for one output directory."""
    directory = Path(directory)
    if not directory.is_dir():
        return CheckResult("file_set", "fail", (f"directory missing: {directory}",))
    found = {p.name for p in directory.iterdir() if p.is_file()}
    missing = sorted(set(expected) - found)
    extra = sorted(found - set(expected))
    diffs = [f"missing: {name}" for name in missing] + [f"unexpected: {name}" for name in extra]
    return CheckResult("file_set", "pass" if not diffs else "fail", tuple(diffs))


def text_golden_check(actual: str | Path, reference: str | Path) -> CheckResult:
    """Byte-exact comparison between an artifact and its golden reference."""
    reference = Path(reference)
    actual = Path(actual)
    try:
        expected_bytes = reference.read_bytes()
    except FileNotFoundError as exc:
        raise ReferenceError(f"golden file missing: {reference}") from exc
    try:
        actual_bytes = actual.read_bytes()
    except FileNotFoundError:
        return CheckResult("text_golden", "fail", (f"actual file missing: {actual}",))
    if actual_bytes == expected_bytes:
        return CheckResult("text_golden", "pass")
    for lineno, (got, want) in enumerate(
        zip(actual_bytes.split(b"\n"), expected_bytes.split(b"\n")), start=1
    ):
        if got != want:
            return CheckResult(
                "text_golden",
                "fail",
                (f"first difference at line {lineno}: {got!r} != {want!r}",),
            )
    return CheckResult(
        "text_golden",
        "fail",
        (f"length differs: {len(actual_bytes)} vs {len(expected_bytes)} bytes",),
    )
